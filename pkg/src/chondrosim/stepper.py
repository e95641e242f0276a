"""IMEX time integration: implicit diffusion, explicit taxis and sources.

One step advances the cell fields by backward Euler on their diffusion
terms while the upwind taxis flux and every source term are taken at the
old time level; the attractant field, which does not diffuse, is advanced
by plain explicit Euler.  1D implicit systems are tridiagonal and solved
directly; 2D systems are solved matrix-free by conjugate gradients in the
trapezoid-weighted inner product, in which the operators are symmetric
positive definite.

A second stepper advances the substituted unknown z = c1 * exp(-(b/a1) h),
whose motility terms take divergence form with a variable coefficient;
it exists to cross-validate the primary formulation.  Its implicit solve
freezes the coefficient at the old time level.  An additive shift of the
exponent (``h_ref``) keeps the exponentials in floating-point range; it
rescales z by a constant and leaves the dynamics identical.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DivergenceError, ParameterError, SolveError
from .grid import FieldSet, Grid, taxis_divergence_upwind, total_mass
from .model import ModelParams, reaction_rhs

__all__ = [
    "ImexConfig",
    "StepDiagnostics",
    "ZFields",
    "step_imex",
    "step_imex_z",
    "init_zfields",
    "reconstruct_c1",
    "suggest_dt",
    "check_bounds",
    "BoundMonitor",
    "RunResult",
    "run_simulation",
]


@dataclass
class ImexConfig:
    """Step-size policy and solver tolerances for a run.

    ``dt`` is the fixed step (or the upper cap when stepping adaptively).
    """

    dt: float
    t_end: float
    linear_tol: float = 1e-10
    cfl_safety: float = 0.9
    check_invariants: bool = True
    max_linear_iter: int = 5000

    def __post_init__(self) -> None:
        if not (self.dt > 0.0 and math.isfinite(self.dt)):
            raise ParameterError(f"dt must be positive and finite, got {self.dt}")
        if self.t_end < 0.0:
            raise ParameterError(f"t_end must be nonnegative, got {self.t_end}")
        if not (0.0 < self.cfl_safety <= 1.0):
            raise ParameterError(f"cfl_safety must be in (0, 1], got {self.cfl_safety}")
        if not (0.0 < self.linear_tol <= 1e-4):
            raise ParameterError(f"linear_tol must be in (0, 1e-4], got {self.linear_tol}")


@dataclass
class StepDiagnostics:
    """Per-step monitored quantities."""

    t: float
    min_c1: float
    min_c2: float
    min_h: float
    mass_c1: float
    mass_c2: float
    max_h: float
    max_taxis_speed: float
    cfl_ratio: float


@dataclass
class ZFields:
    """State of the substituted system: (z, c2, h) plus the exponent shift."""

    z: np.ndarray
    c2: np.ndarray
    h: np.ndarray
    h_ref: float

    def copy(self) -> "ZFields":
        return ZFields(self.z.copy(), self.c2.copy(), self.h.copy(), self.h_ref)


# -- linear solves -----------------------------------------------------------


def _cg(matvec, rhs: np.ndarray, weights: np.ndarray, tol: float, maxiter: int) -> np.ndarray:
    """Conjugate gradients in the weighted inner product <u,v> = sum(w u v)."""

    def dot(u, v):
        return float(np.sum(weights * u * v))

    x = rhs.copy()
    r = rhs - matvec(x)
    bnorm = math.sqrt(dot(rhs, rhs))
    if bnorm == 0.0:
        return np.zeros_like(rhs)
    rs = dot(r, r)
    if math.sqrt(rs) <= tol * bnorm:
        return x
    p = r.copy()
    for it in range(1, maxiter + 1):
        ap = matvec(p)
        alpha = rs / dot(p, ap)
        x += alpha * p
        r -= alpha * ap
        rs_new = dot(r, r)
        if math.sqrt(rs_new) <= tol * bnorm:
            return x
        p = r + (rs_new / rs) * p
        rs = rs_new
    raise SolveError(
        f"conjugate gradients did not reach tol={tol:g} in {maxiter} iterations",
        residual=math.sqrt(rs) / bnorm,
        iterations=maxiter,
    )


def _implicit_diffusion_solve(grid: Grid, rhs: np.ndarray, a: float, dt: float, cfg: ImexConfig) -> np.ndarray:
    """Solve (I - dt*a*lap) u = rhs with Neumann closure."""
    if grid.ndim == 1:
        n = grid.shape[0]
        r = dt * a / grid.dx**2
        diag = np.full(n, 1.0 + 2.0 * r)
        lower = np.full(n, -r)
        upper = np.full(n, -r)
        upper[0] = -2.0 * r
        lower[-1] = -2.0 * r
        return _kernels.thomas_solve(lower, diag, upper, rhs)

    def matvec(u: np.ndarray) -> np.ndarray:
        return u - dt * a * _kernels.laplacian_2d(u, grid.dx, grid.dy)

    return _cg(matvec, rhs, grid.quadrature_weights(), cfg.linear_tol, cfg.max_linear_iter)


def _implicit_weighted_solve(
    grid: Grid, rhs: np.ndarray, w: np.ndarray, a1: float, dt: float, cfg: ImexConfig
) -> np.ndarray:
    """Solve (I - dt*a1*e^{-w} div(e^{w} grad)) z = rhs.

    Both sides are scaled by e^{w}, which symmetrizes the system in the
    trapezoid-weighted inner product.
    """
    ew = np.exp(w)
    if grid.ndim == 1:
        fw = np.exp(0.5 * (w[:-1] + w[1:]))
        r = dt * a1 / grid.dx**2
        n = grid.shape[0]
        diag = np.empty(n)
        lower = np.zeros(n)
        upper = np.zeros(n)
        diag[1:-1] = ew[1:-1] + r * (fw[:-1] + fw[1:])
        lower[1:-1] = -r * fw[:-1]
        upper[1:-1] = -r * fw[1:]
        diag[0] = ew[0] + 2.0 * r * fw[0]
        upper[0] = -2.0 * r * fw[0]
        diag[-1] = ew[-1] + 2.0 * r * fw[-1]
        lower[-1] = -2.0 * r * fw[-1]
        return _kernels.thomas_solve(lower, diag, upper, ew * rhs)

    fwx = np.exp(0.5 * (w[:, :-1] + w[:, 1:]))
    fwy = np.exp(0.5 * (w[:-1, :] + w[1:, :]))

    def matvec(z: np.ndarray) -> np.ndarray:
        return ew * z - dt * a1 * _kernels.weighted_laplacian_2d(z, fwx, fwy, grid.dx, grid.dy)

    return _cg(matvec, ew * rhs, grid.quadrature_weights(), cfg.linear_tol, cfg.max_linear_iter)


# -- stepping ----------------------------------------------------------------


def _advance_h(p: ModelParams, c2: np.ndarray, h: np.ndarray, dt: float) -> np.ndarray:
    return h + dt * (-p.gamma1 * h * c2 + p.gamma2 * c2 / (p.kc2 + c2))


def step_imex(grid: Grid, fields: FieldSet, p: ModelParams, cfg: ImexConfig, dt: float | None = None) -> FieldSet:
    """One IMEX step of the primary (c1, c2, h) formulation."""
    if dt is None:
        dt = cfg.dt
    if not fields.all_finite():
        raise DivergenceError("non-finite field values entering the step")
    vmax = _max_face_speed(grid, fields.h, p.b)
    if vmax > 0.0:
        dx_min = grid.dx if grid.ndim == 1 else min(grid.dx, grid.dy)
        if dt > dx_min / (2.0 * vmax):
            warnings.warn(
                "explicit taxis step exceeds the CFL limit; positivity is not guaranteed",
                RuntimeWarning,
                stacklevel=2,
            )
    taxis = taxis_divergence_upwind(grid, fields.c1, fields.h, p.b)
    r1, r2, _ = reaction_rhs(p, fields.c1, fields.c2, fields.h)
    c1 = _implicit_diffusion_solve(grid, fields.c1 + dt * (taxis + r1), p.a1, dt, cfg)
    c2 = _implicit_diffusion_solve(grid, fields.c2 + dt * r2, p.a2, dt, cfg)
    h = _advance_h(p, fields.c2, fields.h, dt)
    out = FieldSet(c1, c2, h)
    if not out.all_finite():
        raise DivergenceError("time step produced non-finite field values")
    return out


def init_zfields(grid: Grid, fields: FieldSet, p: ModelParams, h_ref: float | None = None) -> ZFields:
    """Transform a FieldSet into the substituted (z, c2, h) state.

    ``h_ref`` recenters the exponent; by default the midrange of the
    initial h, which keeps exp((b/a1)(h - h_ref)) well scaled.
    """
    if h_ref is None:
        h_ref = 0.5 * (float(np.min(fields.h)) + float(np.max(fields.h)))
    w = (p.b / p.a1) * (fields.h - h_ref)
    return ZFields(z=fields.c1 * np.exp(-w), c2=fields.c2.copy(), h=fields.h.copy(), h_ref=h_ref)


def reconstruct_c1(zf: ZFields, p: ModelParams) -> np.ndarray:
    """Recover c1 = z * exp((b/a1)(h - h_ref))."""
    return zf.z * np.exp((p.b / p.a1) * (zf.h - zf.h_ref))


def step_imex_z(grid: Grid, zf: ZFields, p: ModelParams, cfg: ImexConfig, dt: float | None = None) -> ZFields:
    """One IMEX step of the substituted formulation.

    The variable-coefficient motility operator is implicit with the
    coefficient frozen at the old time level; every other term is explicit.
    The c2 and h updates match :func:`step_imex` exactly.
    """
    if dt is None:
        dt = cfg.dt
    w = (p.b / p.a1) * (zf.h - zf.h_ref)
    c1_old = zf.z * np.exp(w)
    k2 = p.kc2 if p.logistic_k2_variant else p.kc1
    crowding = 1.0 - c1_old / p.kc1 - zf.c2 / k2
    saturation = zf.c2 / (p.kc2 + zf.c2)
    explicit = (
        -p.alpha * zf.z
        + p.delta * zf.c2 * np.exp(-w)
        + zf.z
        * (
            p.beta * crowding
            + (p.b * p.gamma1 / p.a1) * zf.h * zf.c2
            - (p.b * p.gamma2 / p.a1) * saturation
        )
    )
    z = _implicit_weighted_solve(grid, zf.z + dt * explicit, w, p.a1, dt, cfg)
    c2 = _implicit_diffusion_solve(grid, zf.c2 + dt * (p.alpha * c1_old - p.delta * zf.c2), p.a2, dt, cfg)
    h = _advance_h(p, zf.c2, zf.h, dt)
    out = ZFields(z, c2, h, zf.h_ref)
    if not (np.all(np.isfinite(z)) and np.all(np.isfinite(c2)) and np.all(np.isfinite(h))):
        raise DivergenceError("time step produced non-finite field values")
    return out


def _max_face_speed(grid: Grid, h: np.ndarray, b: float) -> float:
    """Largest |b * face gradient of h| over all faces."""
    if b == 0.0:
        return 0.0
    speed = 0.0
    if grid.ndim == 1:
        speed = float(np.max(np.abs(np.diff(h)))) * b / grid.dx
    else:
        speed = max(
            float(np.max(np.abs(np.diff(h, axis=1)))) * b / grid.dx,
            float(np.max(np.abs(np.diff(h, axis=0)))) * b / grid.dy,
        )
    return speed


def suggest_dt(grid: Grid, fields: FieldSet, p: ModelParams, cfg: ImexConfig) -> float:
    """Largest explicit-part-safe step, capped by cfg.dt.

    Three restrictions enter: the upwind CFL limit dx/(2 max|v|) (the
    factor 2 covers compressive faces and the half-width boundary cells),
    the kinetic rates, and positivity of the h update.
    """
    vmax = _max_face_speed(grid, fields.h, p.b)
    dx_min = grid.dx if grid.ndim == 1 else min(grid.dx, grid.dy)
    taxis_lim = dx_min / (2.0 * vmax) if vmax > 0.0 else math.inf
    rate_lim = 1.0 / (p.beta + p.alpha + p.delta)
    c2max = float(np.max(fields.c2))
    uptake_lim = 1.0 / (p.gamma1 * c2max) if c2max > 0.0 else math.inf
    return min(cfg.dt, cfg.cfl_safety * min(taxis_lim, rate_lim, uptake_lim))


def collect_diagnostics(
    grid: Grid, fields: FieldSet, p: ModelParams, t: float, dt: float | None = None
) -> StepDiagnostics:
    vmax = _max_face_speed(grid, fields.h, p.b)
    dx_min = grid.dx if grid.ndim == 1 else min(grid.dx, grid.dy)
    cfl = 0.0 if dt is None or vmax == 0.0 else 2.0 * dt * vmax / dx_min
    return StepDiagnostics(
        t=t,
        min_c1=float(np.min(fields.c1)),
        min_c2=float(np.min(fields.c2)),
        min_h=float(np.min(fields.h)),
        mass_c1=total_mass(grid, fields.c1),
        mass_c2=total_mass(grid, fields.c2),
        max_h=float(np.max(fields.h)),
        max_taxis_speed=vmax,
        cfl_ratio=cfl,
    )


# -- a-priori bound monitoring ------------------------------------------------


def check_bounds(
    diag: StepDiagnostics,
    p: ModelParams,
    initial_mass: float,
    h0_max: float,
    scales: tuple[float, float, float] = (1.0, 1.0, 1.0),
) -> list[str]:
    """Violations of nonnegativity, the mass growth bound, and the h sup bound.

    The mass of c1 + c2 may grow at most like exp(beta*t) from its initial
    value; h may never exceed max(h0_max, gamma2/(gamma1*kc2)).  Tolerances
    leave room for roundoff only.
    """
    violations: list[str] = []
    for name, value, scale in (
        ("c1", diag.min_c1, scales[0]),
        ("c2", diag.min_c2, scales[1]),
        ("h", diag.min_h, scales[2]),
    ):
        if value < -1e-10 * scale:
            violations.append(f"negativity:{name} t={diag.t:.6g} min={value:.3e}")
    mass = diag.mass_c1 + diag.mass_c2
    growth = p.beta * diag.t
    mass_bound = math.inf if growth > 700.0 else initial_mass * math.exp(growth) * (1.0 + 1e-6)
    if mass > mass_bound:
        violations.append(f"mass-bound t={diag.t:.6g} mass={mass:.12e} bound={mass_bound:.12e}")
    h_bound = max(h0_max, p.gamma2 / (p.gamma1 * p.kc2)) * (1.0 + 1e-6)
    if diag.max_h > h_bound:
        violations.append(f"h-bound t={diag.t:.6g} max_h={diag.max_h:.12e} bound={h_bound:.12e}")
    return violations


class BoundMonitor:
    """Accumulates bound violations over a run."""

    def __init__(self, grid: Grid, fields0: FieldSet, p: ModelParams):
        self.p = p
        self.initial_mass = total_mass(grid, fields0.c1) + total_mass(grid, fields0.c2)
        self.h0_max = float(np.max(fields0.h))
        self.scales = (
            max(1.0, float(np.max(np.abs(fields0.c1)))),
            max(1.0, float(np.max(np.abs(fields0.c2)))),
            max(1.0, float(np.max(np.abs(fields0.h)))),
        )
        self.violations: list[str] = []

    def check(self, diag: StepDiagnostics) -> list[str]:
        new = check_bounds(diag, self.p, self.initial_mass, self.h0_max, self.scales)
        self.violations.extend(new)
        return new


# -- run loop ------------------------------------------------------------------


@dataclass
class RunResult:
    fields: FieldSet
    t: float
    steps: int
    diagnostics: list[StepDiagnostics]
    violations: list[str]


def run_simulation(
    grid: Grid,
    fields: FieldSet,
    p: ModelParams,
    cfg: ImexConfig,
    dt_policy: float | str = "auto",
    output_times: tuple[float, ...] = (),
    on_output=None,
    record_diagnostics: bool = True,
) -> RunResult:
    """Advance from t=0 to cfg.t_end, stepping exactly onto output times.

    ``dt_policy`` is either a fixed step or "auto" (per-step suggestion).
    ``on_output(t, fields)`` fires at every requested output time.
    A DivergenceError from a step is re-raised annotated with step and time.
    """
    fields = fields.copy()
    t = 0.0
    steps = 0
    monitor = BoundMonitor(grid, fields, p) if cfg.check_invariants else None
    diagnostics: list[StepDiagnostics] = []
    if record_diagnostics:
        diagnostics.append(collect_diagnostics(grid, fields, p, t))
    pending = sorted(set(output_times))
    t_scale = max(1.0, cfg.t_end)

    def maybe_output() -> None:
        while pending and pending[0] <= t + 1e-9 * t_scale:
            t_out = pending.pop(0)
            if on_output is not None:
                on_output(t_out, fields)

    maybe_output()
    while t < cfg.t_end - 1e-9 * t_scale:
        if dt_policy == "auto":
            dt = suggest_dt(grid, fields, p, cfg)
        else:
            dt = min(float(dt_policy), cfg.dt)
        t_target = min(pending[0], cfg.t_end) if pending else cfg.t_end
        hit = False
        if t + dt >= t_target - 1e-9 * t_scale:
            dt = t_target - t
            hit = True
        if dt <= 1e-14 * t_scale:
            raise SolveError(f"time step collapsed to {dt:g} at t={t:g}")
        try:
            fields = step_imex(grid, fields, p, cfg, dt)
        except DivergenceError as err:
            annotated = DivergenceError(
                f"divergence at step {steps + 1}, t={t + dt:.6g}: {err}", step=steps + 1, t=t + dt
            )
            annotated.diagnostics = diagnostics
            raise annotated from err
        t = t_target if hit else t + dt
        steps += 1
        if record_diagnostics or monitor is not None:
            diag = collect_diagnostics(grid, fields, p, t, dt)
            if record_diagnostics:
                diagnostics.append(diag)
            if monitor is not None:
                monitor.check(diag)
        maybe_output()
    return RunResult(
        fields=fields,
        t=t,
        steps=steps,
        diagnostics=diagnostics,
        violations=monitor.violations if monitor is not None else [],
    )
