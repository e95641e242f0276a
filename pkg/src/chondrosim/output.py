"""Serialization of run results: CSV snapshots, time series, PGM heatmaps.

All floats are written with 17 significant digits so that files round-trip
to the exact binary values.  Heatmaps are plain-text PGM (P2) rasters,
row-major starting at (x_min, y_min), linearly scaled between the field
minimum and maximum; a ``.meta`` sidecar records the scaling.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .grid import FieldSet, Grid
from .stepper import StepDiagnostics

__all__ = [
    "snapshot_filename",
    "write_snapshot",
    "read_snapshot",
    "write_timeseries",
    "write_pgm",
    "write_manifest",
    "format_float",
]

PGM_MAXVAL = 255
PGM_MIDGRAY = 128


def format_float(value: float) -> str:
    return f"{value:.17g}"


def format_time(t: float) -> str:
    """Compact time tag for filenames (no spaces, stable)."""
    return f"{t:g}"


def snapshot_filename(scenario_name: str, t: float) -> str:
    return f"{scenario_name}_t{format_time(t)}.csv"


def write_snapshot(grid: Grid, fields: FieldSet, t: float, path: str | Path) -> Path:
    """Write one CSV snapshot: columns x,c1,c2,h (1D) or x,y,c1,c2,h (2D)."""
    path = Path(path)
    lines: list[str] = []
    if grid.ndim == 1:
        lines.append("x,c1,c2,h")
        for i, x in enumerate(grid.x):
            lines.append(
                f"{format_float(x)},{format_float(fields.c1[i])},"
                f"{format_float(fields.c2[i])},{format_float(fields.h[i])}"
            )
    else:
        lines.append("x,y,c1,c2,h")
        xs, ys = grid.x, grid.y
        for iy in range(grid.shape[0]):
            for ix in range(grid.shape[1]):
                lines.append(
                    f"{format_float(xs[ix])},{format_float(ys[iy])},"
                    f"{format_float(fields.c1[iy, ix])},{format_float(fields.c2[iy, ix])},"
                    f"{format_float(fields.h[iy, ix])}"
                )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_snapshot(path: str | Path) -> tuple[np.ndarray, ...]:
    """Read a snapshot CSV back into per-column arrays (header-driven)."""
    text = Path(path).read_text(encoding="utf-8").strip().splitlines()
    header = text[0].split(",")
    data = np.array([[float(v) for v in line.split(",")] for line in text[1:]])
    return tuple(data[:, i] for i in range(len(header)))


def write_timeseries(diagnostics: list[StepDiagnostics], path: str | Path, stride: int = 1) -> Path:
    """Write the monitored time series; the final row is always included."""
    path = Path(path)
    lines = ["t,min_c1,min_c2,min_h,mass_c1,mass_c2,max_h"]
    n = len(diagnostics)
    for i, d in enumerate(diagnostics):
        if i % stride and i != n - 1:
            continue
        lines.append(
            ",".join(
                format_float(v)
                for v in (d.t, d.min_c1, d.min_c2, d.min_h, d.mass_c1, d.mass_c2, d.max_h)
            )
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_pgm(field: np.ndarray, path: str | Path, field_name: str, t: float) -> Path:
    """Write a 2D field as plain PGM plus a .meta sidecar with the scaling.

    Rows run from y_min upward; a constant field renders mid-gray.
    """
    path = Path(path)
    field = np.asarray(field, dtype=float)
    if field.ndim != 2:
        raise ValueError(f"PGM export needs a 2D field, got shape {field.shape}")
    vmin = float(np.min(field))
    vmax = float(np.max(field))
    ny, nx = field.shape
    if vmax > vmin:
        scaled = np.rint((field - vmin) / (vmax - vmin) * PGM_MAXVAL).astype(int)
    else:
        scaled = np.full(field.shape, PGM_MIDGRAY, dtype=int)
    lines = ["P2", f"{nx} {ny}", str(PGM_MAXVAL)]
    for iy in range(ny):
        lines.append(" ".join(str(v) for v in scaled[iy]))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    meta = Path(str(path) + ".meta")
    meta.write_text(
        f"field={field_name}\nt={format_float(t)}\nmin={format_float(vmin)}\nmax={format_float(vmax)}\n",
        encoding="utf-8",
    )
    return path


def config_hash(doc: dict) -> str:
    """Content hash of a canonical config document."""
    import hashlib

    blob = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


def write_manifest(path: str | Path, manifest: dict) -> Path:
    path = Path(path)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path
