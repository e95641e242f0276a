"""End-to-end scenario execution: simulate, serialize, and manifest a run."""

from __future__ import annotations

import json
import time as _time
from dataclasses import dataclass, replace
from pathlib import Path

from . import __version__ as _version
from . import _kernels
from .errors import DivergenceError
from .grid import FieldSet, Grid
from .model import steady_state
from .output import (
    config_hash,
    snapshot_filename,
    write_manifest,
    write_pgm,
    write_snapshot,
    write_timeseries,
)
from .scenarios import ScenarioSpec, build_initial_fields, parse_config, scenario_to_config
from .stability import SpectrumSpec, critical_sensitivity
from .stepper import ImexConfig, RunResult, run_simulation, suggest_dt

__all__ = ["RunSummary", "run_scenario", "run_from_manifest"]

MANIFEST_NAME = "run_manifest.json"
TIMESERIES_NAME = "timeseries.csv"


@dataclass
class RunSummary:
    spec: ScenarioSpec
    result: RunResult
    duration_seconds: float
    out_dir: Path | None
    snapshot_paths: list[Path]


def _resolve_dt_label(spec: ScenarioSpec) -> float | str:
    return spec.dt_policy if isinstance(spec.dt_policy, str) else float(spec.dt_policy)


def run_scenario(
    spec: ScenarioSpec,
    out_dir: str | Path | None = None,
    check_invariants: bool = True,
    record_diagnostics: bool = True,
) -> RunSummary:
    """Run one scenario; write snapshots, heatmaps, time series, and manifest.

    With ``out_dir=None`` nothing touches the filesystem.  On divergence the
    partial diagnostics and a manifest with ``status="diverged"`` are still
    written before the error propagates.
    """
    grid = spec.make_grid()
    fields0 = build_initial_fields(spec, grid)
    cfg = ImexConfig(
        dt=spec.dt_policy if isinstance(spec.dt_policy, float) else spec.t_end,
        t_end=spec.t_end,
        check_invariants=check_invariants,
    )
    out_path = Path(out_dir) if out_dir is not None else None
    snapshot_paths: list[Path] = []

    def on_output(t: float, fields: FieldSet) -> None:
        if out_path is None:
            return
        path = write_snapshot(grid, fields, t, out_path / snapshot_filename(spec.name, t))
        snapshot_paths.append(path)
        if grid.ndim == 2:
            for fname in ("c1", "c2", "h"):
                write_pgm(
                    getattr(fields, fname),
                    out_path / f"{spec.name}_t{t:g}_{fname}.pgm",
                    fname,
                    t,
                )

    if out_path is not None:
        out_path.mkdir(parents=True, exist_ok=True)
    started = _time.perf_counter()
    try:
        result = run_simulation(
            grid,
            fields0,
            spec.params,
            cfg,
            dt_policy=spec.dt_policy,
            output_times=spec.output_times,
            on_output=on_output,
            record_diagnostics=record_diagnostics,
        )
    except DivergenceError as err:
        duration = _time.perf_counter() - started
        if out_path is not None:
            partial = getattr(err, "diagnostics", None)
            if partial:
                write_timeseries(partial, out_path / TIMESERIES_NAME, stride=spec.timeseries_stride)
            _write_run_files(spec, grid, None, duration, out_path, status=f"diverged: {err}")
        raise
    duration = _time.perf_counter() - started
    if out_path is not None:
        _write_run_files(spec, grid, result, duration, out_path, status="completed")
    return RunSummary(
        spec=spec,
        result=result,
        duration_seconds=duration,
        out_dir=out_path,
        snapshot_paths=snapshot_paths,
    )


def _write_run_files(
    spec: ScenarioSpec,
    grid: Grid,
    result: RunResult | None,
    duration: float,
    out_path: Path,
    status: str,
) -> None:
    if result is not None and result.diagnostics:
        write_timeseries(result.diagnostics, out_path / TIMESERIES_NAME, stride=spec.timeseries_stride)
    ss = steady_state(spec.params)
    try:
        report = critical_sensitivity(spec.params, SpectrumSpec(spec.geometry))
        b_crit: float | None = report.b_crit
    except Exception:
        b_crit = None
    doc = scenario_to_config(spec)
    if isinstance(spec.dt_policy, str):
        cfg0 = ImexConfig(dt=spec.t_end, t_end=spec.t_end)
        initial_dt = suggest_dt(grid, build_initial_fields(spec, grid), spec.params, cfg0)
    else:
        initial_dt = float(spec.dt_policy)
    manifest = {
        "name": spec.name,
        "config": doc,
        "config_sha256": config_hash(doc),
        "status": status,
        "resolved": {
            "dt_policy": _resolve_dt_label(spec),
            "initial_dt": initial_dt,
            "steady_state": [ss.c1, ss.c2, ss.h],
            "critical_b": b_crit,
            "kernel_backend": _kernels.BACKEND,
        },
        "steps": result.steps if result is not None else None,
        "violations": result.violations if result is not None else None,
        "duration_seconds": duration,
        "version": _version,
    }
    write_manifest(out_path / MANIFEST_NAME, manifest)


def run_from_manifest(manifest_path: str | Path, out_dir: str | Path | None = None) -> RunSummary:
    """Reproduce a run from its manifest alone."""
    manifest = json.loads(Path(manifest_path).read_text(encoding="utf-8"))
    spec = parse_config(json.dumps(manifest["config"]))
    spec = replace(spec, name=manifest["name"])
    return run_scenario(spec, out_dir=out_dir)
