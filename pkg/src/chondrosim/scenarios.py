"""Built-in simulation scenarios, initial-condition recipes, and config parsing.

A scenario bundles everything a run needs: domain, resolution, model
parameters, per-field initial conditions, time horizon, and output plan.
Initial conditions are small structured recipes ("steady state plus a
Gaussian bump", "constant plus seeded noise", ...) so that runs are fully
reproducible from their textual configuration.

Config documents are JSON with the top-level keys ``scenario``,
``geometry``, ``resolution``, ``params``, ``b``, ``ic``, ``time``,
``output``, and ``seed``.  A document may name a built-in scenario and
override any subset of the rest.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from .domain import Geometry, Interval, Rectangle
from .errors import ConfigError, ParameterError
from .grid import FieldSet, Grid
from .model import ModelParams, default_params, steady_state

__all__ = [
    "ScenarioSpec",
    "builtin_scenarios",
    "builtin_scenario",
    "build_initial_fields",
    "parse_config",
    "scenario_to_config",
    "DEFAULT_SEED",
]

DEFAULT_SEED = 12345

_RECIPE_TYPES = ("none", "gaussian", "cosine", "eigenmode", "noise")


@dataclass(frozen=True)
class ScenarioSpec:
    """A complete, reproducible run description."""

    name: str
    geometry: Geometry
    resolution: tuple[int, ...]
    params: ModelParams
    ic: dict[str, dict[str, Any]]
    t_end: float
    output_times: tuple[float, ...] = ()
    dt_policy: float | str = "auto"
    seed: int | None = None
    timeseries_stride: int = 1
    description: str = ""

    def __post_init__(self) -> None:
        if isinstance(self.geometry, Interval) and len(self.resolution) != 1:
            raise ConfigError("interval geometry needs a single resolution value")
        if isinstance(self.geometry, Rectangle) and len(self.resolution) != 2:
            raise ConfigError("rectangle geometry needs a [nx, ny] resolution")
        if any(n < 3 for n in self.resolution):
            raise ConfigError(f"resolution must be >= 3 nodes per dimension, got {self.resolution}")
        if self.t_end <= 0.0:
            raise ConfigError(f"t_end must be positive, got {self.t_end}")
        times = self.output_times
        if any(t < 0.0 or t > self.t_end for t in times):
            raise ConfigError(f"output times must lie in [0, t_end], got {times}")
        if list(times) != sorted(times):
            raise ConfigError("output times must be sorted ascending")
        if isinstance(self.dt_policy, str) and self.dt_policy != "auto":
            raise ConfigError(f'dt policy must be a positive number or "auto", got {self.dt_policy!r}')
        if not isinstance(self.dt_policy, str) and self.dt_policy <= 0.0:
            raise ConfigError(f"fixed dt must be positive, got {self.dt_policy}")
        if self.timeseries_stride < 1:
            raise ConfigError("timeseries_stride must be >= 1")
        for fname in ("c1", "c2", "h"):
            if fname not in self.ic:
                raise ConfigError(f'ic is missing field "{fname}"')
            _validate_recipe(fname, self.ic[fname])
        if self._uses_noise() and self.seed is None:
            raise ConfigError("a seed is required whenever a noise recipe is used")

    def _uses_noise(self) -> bool:
        return any(rec.get("perturbation", {}).get("type") == "noise" for rec in self.ic.values())

    def make_grid(self) -> Grid:
        if isinstance(self.geometry, Interval):
            return Grid.interval(self.geometry.length, self.resolution[0])
        return Grid.rectangle(self.geometry.lx, self.geometry.ly, self.resolution[0], self.resolution[1])

    def with_seed(self, seed: int) -> "ScenarioSpec":
        return replace(self, seed=seed)


def _validate_recipe(fname: str, recipe: dict[str, Any]) -> None:
    allowed = {"base", "perturbation"}
    unknown = set(recipe) - allowed
    if unknown:
        raise ConfigError(f'ic.{fname}: unknown keys {sorted(unknown)}; expected {sorted(allowed)}')
    base = recipe.get("base", "steady")
    if base != "steady" and not isinstance(base, (int, float)):
        raise ConfigError(f'ic.{fname}.base: expected "steady" or a number, got {base!r}')
    pert = recipe.get("perturbation", {"type": "none"})
    if not isinstance(pert, dict):
        raise ConfigError(f"ic.{fname}.perturbation: expected an object, got {type(pert).__name__}")
    ptype = pert.get("type", "none")
    if ptype not in _RECIPE_TYPES:
        raise ConfigError(f"ic.{fname}.perturbation.type: expected one of {_RECIPE_TYPES}, got {ptype!r}")
    required = {
        "none": set(),
        "gaussian": {"amplitude", "center", "width"},
        "cosine": {"amplitude", "periods"},
        "eigenmode": {"amplitude", "index"},
        "noise": {"amplitude"},
    }[ptype]
    allowed_keys = {"type"} | required | ({"modulation_periods"} if ptype == "noise" else set())
    unknown = set(pert) - allowed_keys
    if unknown:
        raise ConfigError(f"ic.{fname}.perturbation: unknown keys {sorted(unknown)}")
    missing = required - set(pert)
    if missing:
        raise ConfigError(f"ic.{fname}.perturbation: missing keys {sorted(missing)}")
    for key in required | ({"modulation_periods"} & set(pert)):
        value = pert[key]
        if key == "center":
            if not isinstance(value, (list, tuple)) or not all(isinstance(v, (int, float)) for v in value):
                raise ConfigError(f"ic.{fname}.perturbation.center: expected a list of numbers, got {value!r}")
        elif key == "index":
            if not isinstance(value, int) or value < 1:
                raise ConfigError(f"ic.{fname}.perturbation.index: expected a positive integer, got {value!r}")
        elif not isinstance(value, (int, float)) or not np.isfinite(value):
            raise ConfigError(f"ic.{fname}.perturbation.{key}: expected a finite number, got {value!r}")


# -- initial-condition evaluation ---------------------------------------------


def _perturbation(grid: Grid, pert: dict[str, Any], rng: np.random.Generator | None) -> np.ndarray:
    ptype = pert.get("type", "none")
    if ptype == "none":
        return np.zeros(grid.shape)
    amp = float(pert["amplitude"])
    if ptype == "gaussian":
        center = [float(c) for c in pert["center"]]
        width = float(pert["width"])
        if grid.ndim == 1:
            return amp * np.exp(-((grid.x - center[0]) ** 2) / width)
        X, Y = grid.meshgrid()
        return amp * np.exp(-((X - center[0]) ** 2 + (Y - center[1]) ** 2) / width)
    if ptype == "cosine":
        periods = float(pert["periods"])
        if grid.ndim == 1:
            length = grid.geometry.length
            return amp * np.cos(2.0 * np.pi * periods * (grid.x - 0.5 * length) / length)
        X, _ = grid.meshgrid()
        lx = grid.geometry.lx
        return amp * np.cos(2.0 * np.pi * periods * (X - 0.5 * lx) / lx)
    if ptype == "eigenmode":
        index = int(pert["index"])
        if grid.ndim == 1:
            return amp * np.cos(index * np.pi * grid.x / grid.geometry.length)
        X, _ = grid.meshgrid()
        return amp * np.cos(index * np.pi * X / grid.geometry.lx)
    if ptype == "noise":
        if rng is None:
            raise ConfigError("noise recipe used without a seed")
        u = rng.random(grid.shape)
        if "modulation_periods" in pert:
            periods = float(pert["modulation_periods"])
            lx = grid.geometry.length if grid.ndim == 1 else grid.geometry.lx
            xs = grid.x if grid.ndim == 1 else grid.meshgrid()[0]
            u = u * np.cos(2.0 * np.pi * periods * (xs - 0.5 * lx) / lx)
        return amp * u
    raise ConfigError(f"unknown perturbation type {ptype!r}")


def build_initial_fields(spec: ScenarioSpec, grid: Grid | None = None) -> FieldSet:
    """Evaluate the scenario's initial-condition recipes on its grid.

    Noise draws come from a counter-based generator keyed by the scenario
    seed, in fixed field order (c1, c2, h), so results are reproducible
    bit for bit.
    """
    if grid is None:
        grid = spec.make_grid()
    ss = steady_state(spec.params)
    rng = np.random.Generator(np.random.Philox(key=spec.seed)) if spec.seed is not None else None
    out: dict[str, np.ndarray] = {}
    for fname, base_value in (("c1", ss.c1), ("c2", ss.c2), ("h", ss.h)):
        recipe = spec.ic[fname]
        base = recipe.get("base", "steady")
        value = base_value if base == "steady" else float(base)
        out[fname] = np.full(grid.shape, value) + _perturbation(
            grid, recipe.get("perturbation", {"type": "none"}), rng
        )
    return FieldSet(c1=out["c1"], c2=out["c2"], h=out["h"])


# -- built-in scenarios --------------------------------------------------------


def _steady() -> dict[str, Any]:
    return {"base": "steady", "perturbation": {"type": "none"}}


def _bump(amplitude: float, center: list[float]) -> dict[str, Any]:
    return {
        "base": "steady",
        "perturbation": {"type": "gaussian", "amplitude": amplitude, "center": center, "width": 0.2},
    }


def builtin_scenarios() -> list[ScenarioSpec]:
    """The shipped scenario catalogue.

    Four 1D perturbation studies on the baseline parameter set (the first
    three on [0,1], the periodic one on [0,10]) and two 2D runs on [0,10]^2
    seeded with a central blob plus either flat or stripe-modulated noise
    on the attractant.  End times and output times are package defaults,
    not model constants; time is nondimensional throughout.
    """
    scenarios: list[ScenarioSpec] = []
    times_1d = (0.0, 50.0, 100.0, 150.0, 200.0)
    for b in (3.7, 1.8):
        scenarios.append(
            ScenarioSpec(
                name=f"scenario1-b{b}",
                geometry=Interval(1.0),
                resolution=(401,),
                params=default_params(b=b),
                ic={"c1": _steady(), "c2": _bump(0.1, [0.5]), "h": _steady()},
                t_end=200.0,
                output_times=times_1d,
                timeseries_stride=100,
                description="central bump on the differentiated population",
            )
        )
    for b in (3.7, 1.8):
        scenarios.append(
            ScenarioSpec(
                name=f"scenario2-b{b}",
                geometry=Interval(1.0),
                resolution=(401,),
                params=default_params(b=b),
                ic={"c1": _bump(0.1, [0.5]), "c2": _steady(), "h": _steady()},
                t_end=200.0,
                output_times=times_1d,
                timeseries_stride=100,
                description="central bump on the motile population",
            )
        )
    scenarios.append(
        ScenarioSpec(
            name="scenario3-b3.7",
            geometry=Interval(1.0),
            resolution=(401,),
            params=default_params(b=3.7),
            ic={"c1": _steady(), "c2": _steady(), "h": _bump(0.1, [0.5])},
            t_end=200.0,
            output_times=times_1d,
            timeseries_stride=100,
            description="central bump on the attractant",
        )
    )
    cosine = {"base": "steady", "perturbation": {"type": "cosine", "amplitude": 0.01, "periods": 2}}
    for b in (3.7, 1.8):
        scenarios.append(
            ScenarioSpec(
                name=f"scenario4-b{b}",
                geometry=Interval(10.0),
                resolution=(401,),
                params=default_params(b=b),
                ic={"c1": cosine, "c2": _steady(), "h": cosine},
                t_end=200.0,
                output_times=times_1d,
                timeseries_stride=100,
                description="periodic perturbation of motile population and attractant",
            )
        )
    blob_c1 = {
        "base": "steady",
        "perturbation": {"type": "gaussian", "amplitude": 1e-6, "center": [5.0, 5.0], "width": 0.2},
    }
    blob_c2 = {
        "base": "steady",
        "perturbation": {"type": "gaussian", "amplitude": 1e-9, "center": [5.0, 5.0], "width": 0.2},
    }
    times_2d = (0.0, 15.0, 30.0, 60.0)
    scenarios.append(
        ScenarioSpec(
            name="2d-gaussian",
            geometry=Rectangle(10.0, 10.0),
            resolution=(101, 101),
            params=default_params(b=3.7),
            ic={
                "c1": blob_c1,
                "c2": blob_c2,
                "h": {"base": 1.0, "perturbation": {"type": "noise", "amplitude": 1e-6}},
            },
            t_end=60.0,
            output_times=times_2d,
            seed=DEFAULT_SEED,
            timeseries_stride=10,
            description="2D central blob with flat noisy attractant",
        )
    )
    scenarios.append(
        ScenarioSpec(
            name="2d-cosine",
            geometry=Rectangle(10.0, 10.0),
            resolution=(101, 101),
            params=default_params(b=3.7),
            ic={
                "c1": blob_c1,
                "c2": blob_c2,
                "h": {
                    "base": 1.0,
                    "perturbation": {"type": "noise", "amplitude": 1e-6, "modulation_periods": 2},
                },
            },
            t_end=60.0,
            output_times=times_2d,
            seed=DEFAULT_SEED,
            timeseries_stride=10,
            description="2D central blob with stripe-modulated noisy attractant",
        )
    )
    return scenarios


def builtin_scenario(name: str) -> ScenarioSpec:
    for spec in builtin_scenarios():
        if spec.name == name:
            return spec
    known = ", ".join(s.name for s in builtin_scenarios())
    raise ConfigError(f"unknown scenario {name!r}; known scenarios: {known}")


# -- config ingestion ----------------------------------------------------------

_TOP_KEYS = {"scenario", "geometry", "resolution", "params", "b", "ic", "time", "output", "seed"}
_PARAM_KEYS = {"a1", "a2", "b", "alpha", "delta", "beta", "gamma1", "gamma2", "kc1", "kc2", "logistic_k2_variant"}


def _expect_number(doc: dict[str, Any], key: str, context: str, positive: bool = False) -> float:
    value = doc[key]
    if not isinstance(value, (int, float)) or isinstance(value, bool) or not np.isfinite(value):
        raise ConfigError(f'key "{context}{key}": expected a finite number, got {value!r}')
    if positive and value <= 0:
        raise ConfigError(f'key "{context}{key}": expected a positive number, got {value!r}')
    return float(value)


def _parse_geometry(doc: Any) -> Geometry:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ConfigError('key "geometry": expected an object with a "kind" entry')
    kind = doc["kind"]
    if kind == "interval":
        unknown = set(doc) - {"kind", "length"}
        if unknown:
            raise ConfigError(f'key "geometry": unknown keys {sorted(unknown)}')
        return Interval(_expect_number(doc, "length", "geometry.", positive=True))
    if kind == "rectangle":
        unknown = set(doc) - {"kind", "lx", "ly"}
        if unknown:
            raise ConfigError(f'key "geometry": unknown keys {sorted(unknown)}')
        return Rectangle(
            _expect_number(doc, "lx", "geometry.", positive=True),
            _expect_number(doc, "ly", "geometry.", positive=True),
        )
    raise ConfigError(f'key "geometry.kind": expected "interval" or "rectangle", got {kind!r}')


def _parse_params(doc: Any, base: ModelParams | None) -> ModelParams:
    if not isinstance(doc, dict):
        raise ConfigError('key "params": expected an object')
    unknown = set(doc) - _PARAM_KEYS
    if unknown:
        raise ConfigError(f'key "params": unknown keys {sorted(unknown)}; expected {sorted(_PARAM_KEYS)}')
    if base is not None:
        merged: dict[str, Any] = {k: getattr(base, k) for k in _PARAM_KEYS}
    else:
        merged = {"b": 0.0, "kc1": 1.0, "kc2": 1.0, "logistic_k2_variant": False}
    for key in doc:
        if key == "logistic_k2_variant":
            if not isinstance(doc[key], bool):
                raise ConfigError(f'key "params.logistic_k2_variant": expected a boolean, got {doc[key]!r}')
            merged[key] = doc[key]
        else:
            merged[key] = _expect_number(doc, key, "params.")
    missing = {k for k in _PARAM_KEYS if k not in merged and k not in ("logistic_k2_variant", "b", "kc1", "kc2")}
    if missing:
        raise ConfigError(f'key "params": missing required entries {sorted(missing)}')
    try:
        return ModelParams(**merged)
    except ParameterError as err:
        raise ConfigError(f'key "params": {err}') from err


def parse_config(text: str) -> ScenarioSpec:
    """Parse and validate a JSON run configuration into a ScenarioSpec.

    Unknown keys are rejected.  If "scenario" names a built-in, its fields
    serve as defaults and the remaining keys override them.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"config is not valid JSON: {err}") from err
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown top-level keys {sorted(unknown)}; expected {sorted(_TOP_KEYS)}")

    base: ScenarioSpec | None = None
    if "scenario" in doc:
        if not isinstance(doc["scenario"], str):
            raise ConfigError(f'key "scenario": expected a string, got {doc["scenario"]!r}')
        base = builtin_scenario(doc["scenario"])

    geometry = _parse_geometry(doc["geometry"]) if "geometry" in doc else (base.geometry if base else None)
    if geometry is None:
        raise ConfigError('key "geometry" is required when no built-in scenario is named')

    if "resolution" in doc:
        res = doc["resolution"]
        if isinstance(res, int) and not isinstance(res, bool):
            resolution: tuple[int, ...] = (res,)
        elif isinstance(res, list) and all(isinstance(v, int) and not isinstance(v, bool) for v in res):
            resolution = tuple(res)
        else:
            raise ConfigError(f'key "resolution": expected an integer or list of integers, got {res!r}')
    elif base is not None and type(base.geometry) is type(geometry):
        resolution = base.resolution
    else:
        resolution = (401,) if isinstance(geometry, Interval) else (101, 101)

    params = _parse_params(doc.get("params", {}), base.params if base else None) if (
        "params" in doc or base is not None
    ) else None
    if params is None:
        raise ConfigError('key "params" is required when no built-in scenario is named')
    if "b" in doc:
        params = params.with_b(_expect_number(doc, "b", ""))

    if "ic" in doc:
        ic_doc = doc["ic"]
        if not isinstance(ic_doc, dict):
            raise ConfigError('key "ic": expected an object with entries c1, c2, h')
        unknown = set(ic_doc) - {"c1", "c2", "h"}
        if unknown:
            raise ConfigError(f'key "ic": unknown keys {sorted(unknown)}')
        ic = {k: dict(v) for k, v in (base.ic.items() if base else ())}
        for k, v in ic_doc.items():
            ic[k] = v
        for fname in ("c1", "c2", "h"):
            ic.setdefault(fname, _steady())
    elif base is not None:
        ic = {k: dict(v) for k, v in base.ic.items()}
    else:
        raise ConfigError('key "ic" is required when no built-in scenario is named')

    t_end = base.t_end if base else None
    dt_policy: float | str = base.dt_policy if base else "auto"
    if "time" in doc:
        tdoc = doc["time"]
        if not isinstance(tdoc, dict):
            raise ConfigError('key "time": expected an object')
        unknown = set(tdoc) - {"t_end", "dt"}
        if unknown:
            raise ConfigError(f'key "time": unknown keys {sorted(unknown)}')
        if "t_end" in tdoc:
            t_end = _expect_number(tdoc, "t_end", "time.", positive=True)
        if "dt" in tdoc:
            dt_policy = tdoc["dt"] if tdoc["dt"] == "auto" else _expect_number(tdoc, "dt", "time.", positive=True)
    if t_end is None:
        raise ConfigError('key "time.t_end" is required when no built-in scenario is named')

    output_times: tuple[float, ...] = base.output_times if base else ()
    stride = base.timeseries_stride if base else 1
    times_explicit = False
    if "output" in doc:
        odoc = doc["output"]
        if not isinstance(odoc, dict):
            raise ConfigError('key "output": expected an object')
        unknown = set(odoc) - {"times", "timeseries_stride"}
        if unknown:
            raise ConfigError(f'key "output": unknown keys {sorted(unknown)}')
        if "times" in odoc:
            times = odoc["times"]
            if not isinstance(times, list) or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in times
            ):
                raise ConfigError(f'key "output.times": expected a list of numbers, got {times!r}')
            output_times = tuple(float(v) for v in times)
            times_explicit = True
        if "timeseries_stride" in odoc:
            if not isinstance(odoc["timeseries_stride"], int) or odoc["timeseries_stride"] < 1:
                raise ConfigError('key "output.timeseries_stride": expected a positive integer')
            stride = odoc["timeseries_stride"]
    # Clip inherited output times when t_end is shortened by an override;
    # explicitly requested times must fit the horizon and are validated below.
    if not times_explicit:
        output_times = tuple(t for t in output_times if t <= t_end)

    seed = base.seed if base else None
    if "seed" in doc:
        if not isinstance(doc["seed"], int) or isinstance(doc["seed"], bool):
            raise ConfigError(f'key "seed": expected an integer, got {doc["seed"]!r}')
        seed = doc["seed"]

    name = doc.get("scenario", base.name if base else "custom")
    return ScenarioSpec(
        name=name,
        geometry=geometry,
        resolution=resolution,
        params=params,
        ic=ic,
        t_end=t_end,
        output_times=output_times,
        dt_policy=dt_policy,
        seed=seed,
        timeseries_stride=stride,
        description=base.description if base else "",
    )


def scenario_to_config(spec: ScenarioSpec) -> dict[str, Any]:
    """Canonical config document reproducing the scenario via parse_config."""
    geometry: dict[str, Any]
    if isinstance(spec.geometry, Interval):
        geometry = {"kind": "interval", "length": spec.geometry.length}
        resolution: Any = spec.resolution[0]
    else:
        geometry = {"kind": "rectangle", "lx": spec.geometry.lx, "ly": spec.geometry.ly}
        resolution = list(spec.resolution)
    doc: dict[str, Any] = {
        "geometry": geometry,
        "resolution": resolution,
        "params": {
            "a1": spec.params.a1,
            "a2": spec.params.a2,
            "b": spec.params.b,
            "alpha": spec.params.alpha,
            "delta": spec.params.delta,
            "beta": spec.params.beta,
            "gamma1": spec.params.gamma1,
            "gamma2": spec.params.gamma2,
            "kc1": spec.params.kc1,
            "kc2": spec.params.kc2,
            "logistic_k2_variant": spec.params.logistic_k2_variant,
        },
        "ic": {k: spec.ic[k] for k in ("c1", "c2", "h")},
        "time": {"t_end": spec.t_end, "dt": spec.dt_policy},
        "output": {"times": list(spec.output_times), "timeseries_stride": spec.timeseries_stride},
    }
    if spec.seed is not None:
        doc["seed"] = spec.seed
    return doc
