"""Linear stability of the homogeneous equilibrium and its taxis-driven loss.

For a spatial mode with Neumann-Laplacian eigenvalue k, linearizing the
full system around the equilibrium gives a 3x3 matrix whose characteristic
polynomial is a monic cubic.  The Routh-Hurwitz conditions on its
coefficients decide stability mode by mode.  Diffusion alone never
destabilizes; the taxis sensitivity b enters the constant coefficient
linearly, and for each k > 0 there is a threshold value of b at which the
Routh-Hurwitz gap closes.  The minimum of that threshold over the nonzero
spectrum is the critical sensitivity, where a conjugate pair of eigenvalues
crosses the imaginary axis (a Hopf point).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .domain import Geometry, Interval, Rectangle
from .errors import ParameterError
from .model import ModelParams, reaction_jacobian, steady_state

__all__ = [
    "SpectrumSpec",
    "CharCoeffs",
    "StabilityReport",
    "laplacian_eigenvalues",
    "eigenvalues_up_to",
    "char_coeffs",
    "routh_hurwitz_stable",
    "cubic_roots",
    "threshold_sensitivity",
    "critical_sensitivity",
    "hopf_diagnostics",
    "spectral_abscissa",
]

_DEDUP_RTOL = 1e-12
_DEGENERACY_RTOL = 1e-10


@dataclass(frozen=True)
class SpectrumSpec:
    """Neumann-Laplacian spectrum of a domain, with an enumeration cap."""

    geometry: Geometry
    max_modes: int = 200_000


@dataclass(frozen=True)
class CharCoeffs:
    """Coefficients of the monic cubic lam^3 + a2*lam^2 + a1*lam + a0."""

    a2: float
    a1: float
    a0: float


@dataclass
class StabilityReport:
    """Result of the critical-sensitivity search and Hopf diagnostics.

    ``mode_index`` is the position of the minimizing eigenvalue in the
    ascending distinct spectrum (index 0 is the constant mode k = 0).
    ``hopf_frequency`` and ``transversality_slope`` are filled by
    :func:`hopf_diagnostics` and stay None when the minimum is degenerate.
    """

    b_crit: float
    mode_index: int
    eigenvalue: float
    degenerate: bool
    table: list[tuple[int, float, float]] = field(default_factory=list)
    hopf_frequency: float | None = None
    transversality_slope: float | None = None


def _dedup_sorted(values: np.ndarray) -> np.ndarray:
    """Collapse entries of a sorted array that agree to relative 1e-12."""
    if values.size == 0:
        return values
    out = [values[0]]
    for v in values[1:]:
        if v - out[-1] > _DEDUP_RTOL * max(1.0, abs(v)):
            out.append(v)
    return np.asarray(out)


def eigenvalues_up_to(spec: SpectrumSpec, kmax: float, extra: int = 0) -> np.ndarray:
    """All distinct Neumann eigenvalues <= kmax, plus ``extra`` more beyond.

    The returned array is ascending, deduplicated, and starts at 0.
    """
    if kmax < 0.0:
        raise ParameterError(f"kmax must be nonnegative, got {kmax}")
    geom = spec.geometry
    if isinstance(geom, Interval):
        step = (np.pi / geom.length) ** 2
        jmax = int(np.floor(np.sqrt(kmax / step))) if kmax > 0 else 0
        n = jmax + 1 + extra
        if n > spec.max_modes:
            raise ParameterError(f"spectrum enumeration exceeds max_modes={spec.max_modes}")
        return np.array([(j * np.pi / geom.length) ** 2 for j in range(n)])

    # Rectangle: grow the search window until `extra` distinct values lie
    # beyond kmax; a window bound K captures every eigenvalue <= K exactly.
    K = max(kmax, (np.pi / max(geom.lx, geom.ly)) ** 2)
    while True:
        mmax = int(np.floor(np.sqrt(K) * geom.lx / np.pi))
        nmax = int(np.floor(np.sqrt(K) * geom.ly / np.pi))
        if (mmax + 1) * (nmax + 1) > spec.max_modes:
            raise ParameterError(f"spectrum enumeration exceeds max_modes={spec.max_modes}")
        kx = (np.arange(mmax + 1) * np.pi / geom.lx) ** 2
        ky = (np.arange(nmax + 1) * np.pi / geom.ly) ** 2
        sums = (kx[:, None] + ky[None, :]).ravel()
        sums = _dedup_sorted(np.sort(sums[sums <= K]))
        beyond = np.flatnonzero(sums > kmax)
        if beyond.size >= extra:
            if extra == 0:
                return sums[sums <= kmax]
            return sums[: beyond[extra - 1] + 1]
        K *= 2.0


def laplacian_eigenvalues(spec: SpectrumSpec, count: int) -> np.ndarray:
    """The ``count`` smallest distinct Neumann eigenvalues, ascending from 0."""
    if count <= 0:
        raise ParameterError(f"count must be a positive integer, got {count}")
    geom = spec.geometry
    if isinstance(geom, Interval):
        if count > spec.max_modes:
            raise ParameterError(f"count exceeds max_modes={spec.max_modes}")
        return np.array([(j * np.pi / geom.length) ** 2 for j in range(count)])
    kguess = ((np.sqrt(float(count)) + 2.0) * np.pi / min(geom.lx, geom.ly)) ** 2
    while True:
        vals = eigenvalues_up_to(spec, kguess)
        if vals.size >= count:
            return vals[:count]
        kguess *= 2.0


def _linearized_matrix(p: ModelParams, k: float, b: float) -> np.ndarray:
    """Linearization at the equilibrium for spatial-mode eigenvalue k."""
    s = steady_state(p)
    J = reaction_jacobian(p, s)
    J[0, 0] -= p.a1 * k
    J[1, 1] -= p.a2 * k
    J[0, 2] += b * s.c1 * k
    return J


def char_coeffs(p: ModelParams, k: float, b: float | None = None) -> CharCoeffs:
    """Characteristic-polynomial coefficients of the mode-k linearization.

    ``b`` defaults to the taxis sensitivity stored in ``p``.  The quadratic
    and linear coefficients do not depend on b; the constant one is affine
    increasing in b for k > 0.
    """
    if k < 0.0:
        raise ParameterError(f"Laplacian eigenvalue k must be >= 0, got {k}")
    if b is None:
        b = p.b
    J = _linearized_matrix(p, k, b)
    a2 = -(J[0, 0] + J[1, 1] + J[2, 2])
    a1 = (
        (J[1, 1] * J[2, 2] - J[1, 2] * J[2, 1])
        + (J[0, 0] * J[2, 2] - J[0, 2] * J[2, 0])
        + (J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0])
    )
    # J[2,0] = J[1,2] = 0, so the determinant has three surviving terms.
    a0 = -(
        J[0, 0] * J[1, 1] * J[2, 2]
        - J[0, 1] * J[1, 0] * J[2, 2]
        + J[0, 2] * J[1, 0] * J[2, 1]
    )
    return CharCoeffs(a2=float(a2), a1=float(a1), a0=float(a0))


def routh_hurwitz_stable(c: CharCoeffs) -> bool:
    """True iff all roots of the cubic have strictly negative real parts."""
    return c.a2 > 0.0 and c.a1 > 0.0 and c.a0 > 0.0 and c.a2 * c.a1 - c.a0 > 0.0


def cubic_roots(c: CharCoeffs) -> np.ndarray:
    """Roots of the monic cubic, Newton-polished, conjugate pairs exact.

    Returns a length-3 complex array.  Each root r satisfies
    |p(r)| <= 1e-10 * (1 + |r|^3).
    """
    coeffs = np.array([1.0, c.a2, c.a1, c.a0])
    roots = np.roots(coeffs).astype(complex)

    def poly(z: complex) -> complex:
        return ((z + c.a2) * z + c.a1) * z + c.a0

    def dpoly(z: complex) -> complex:
        return (3.0 * z + 2.0 * c.a2) * z + c.a1

    polished = []
    for r in roots:
        d = dpoly(r)
        if abs(d) > 1e-300:
            r = r - poly(r) / d
        polished.append(r)
    roots = np.array(polished)

    # Snap numerically-real roots to the real axis, then restore exact
    # conjugation for the remaining pair.
    scale = 1.0 + np.abs(roots)
    is_real = np.abs(roots.imag) <= 1e-9 * scale
    roots[is_real] = roots[is_real].real
    cplx = np.flatnonzero(~is_real)
    if cplx.size == 2:
        i, j = cplx
        mean = 0.5 * (roots[i] + np.conj(roots[j]))
        roots[i], roots[j] = mean, np.conj(mean)
    elif cplx.size == 1:
        roots[cplx[0]] = roots[cplx[0]].real
    return roots[np.argsort(roots.real)]


def spectral_abscissa(p: ModelParams, k: float, b: float | None = None) -> float:
    """Largest real part among the mode-k eigenvalues."""
    return float(np.max(cubic_roots(char_coeffs(p, k, b)).real))


def _gap_cubic_coeffs(p: ModelParams) -> tuple[np.ndarray, float]:
    """Coefficients of the b-independent part of the Routh-Hurwitz gap.

    The gap a2(k)*a1(k) - a0(k, b) equals q(k) - b*s*k with q a cubic in k
    with nonnegative coefficients and s > 0.  q is reconstructed exactly by
    interpolation (it is a polynomial), s from the affine b-dependence of
    the constant coefficient.  Returns (q highest-first, s).
    """

    def gap_at_b0(k: float) -> float:
        cc = char_coeffs(p, k, 0.0)
        return cc.a2 * cc.a1 - cc.a0

    nodes = np.array([0.0, 1.0, 2.0, 3.0])
    vand = np.vander(nodes, 4)
    q = np.linalg.solve(vand, np.array([gap_at_b0(k) for k in nodes]))
    s = char_coeffs(p, 1.0, 1.0).a0 - char_coeffs(p, 1.0, 0.0).a0
    if np.any(q < -1e-9 * max(1.0, float(np.max(np.abs(q))))):
        warnings.warn(
            "reconstructed Routh-Hurwitz gap cubic has a negative coefficient "
            f"({q.tolist()}); threshold convexity is not guaranteed",
            RuntimeWarning,
            stacklevel=3,
        )
    return q, float(s)


def threshold_sensitivity(p: ModelParams, k: float) -> float:
    """Taxis sensitivity at which the mode-k Routh-Hurwitz gap vanishes.

    Defined for k > 0; diverges as k -> 0+ and k -> infinity and is
    strictly convex in between.
    """
    if k <= 0.0:
        raise ParameterError(f"threshold_sensitivity requires k > 0, got {k}")
    c0 = char_coeffs(p, k, 0.0)
    c1 = char_coeffs(p, k, 1.0)
    slope = c1.a0 - c0.a0
    return (c0.a2 * c0.a1 - c0.a0) / slope


def _threshold_minimizer(p: ModelParams) -> float:
    """Continuous minimizer of the threshold curve, by bisection on its slope."""
    q, s = _gap_cubic_coeffs(p)
    b1, b2, _, b4 = q  # q(k) = b1 k^3 + b2 k^2 + b3 k + b4

    def dpsi_sign(k: float) -> float:
        # psi(k) = q(k)/(s k); numerator of psi'(k)*s*k^2: 2 b1 k^3 + b2 k^2 - b4
        return (2.0 * b1 * k + b2) * k * k - b4

    lo, hi = 1e-12, 1.0
    while dpsi_sign(hi) < 0.0:
        hi *= 2.0
        if hi > 1e18:
            raise ParameterError("threshold curve has no interior minimizer")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if dpsi_sign(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def critical_sensitivity(p: ModelParams, spec: SpectrumSpec) -> StabilityReport:
    """Minimize the threshold curve over the nonzero Neumann spectrum.

    Convexity of the threshold makes the enumeration cutoff provably
    sufficient: every eigenvalue up to the continuous minimizer is
    evaluated, plus the next two beyond it.  ``degenerate`` is set when two
    distinct eigenvalues attain the minimum within relative 1e-10.
    """
    kstar = _threshold_minimizer(p)
    ks = eigenvalues_up_to(spec, kstar, extra=2)
    nonzero = ks[ks > 0.0]
    if nonzero.size == 0:
        raise ParameterError("no nonzero Laplacian eigenvalues below the enumeration cutoff")
    psis = np.array([threshold_sensitivity(p, k) for k in nonzero])
    imin = int(np.argmin(psis))
    b_crit = float(psis[imin])
    others = np.delete(psis, imin)
    degenerate = bool(others.size and np.min(others) - b_crit <= _DEGENERACY_RTOL * abs(b_crit))
    table = [(j + 1, float(k), float(v)) for j, (k, v) in enumerate(zip(nonzero, psis))]
    return StabilityReport(
        b_crit=b_crit,
        mode_index=imin + 1,
        eigenvalue=float(nonzero[imin]),
        degenerate=degenerate,
        table=table,
    )


def _conjugate_pair_real_part(p: ModelParams, k: float, b: float) -> float:
    roots = cubic_roots(char_coeffs(p, k, b))
    cplx = roots[np.abs(roots.imag) > 0.0]
    if cplx.size == 0:
        # Pair collapsed onto the real axis; take the two rightmost roots.
        return float(np.mean(np.sort(roots.real)[1:]))
    return float(np.max(cplx.real))


def hopf_diagnostics(p: ModelParams, spec: SpectrumSpec) -> StabilityReport:
    """Critical sensitivity plus oscillation frequency and crossing speed.

    At the critical sensitivity the minimizing mode carries one negative
    real eigenvalue and a conjugate pair on the imaginary axis; the pair's
    frequency satisfies omega^2 = a1 there.  The crossing speed is a
    centered finite-difference estimate of d(Re pair)/db with step
    1e-5 * b_crit.  When the minimum is degenerate the diagnostics are
    withheld (fields stay None).
    """
    report = critical_sensitivity(p, spec)
    if report.degenerate:
        return report
    k0, bc = report.eigenvalue, report.b_crit
    roots = cubic_roots(char_coeffs(p, k0, bc))
    cplx = roots[np.abs(roots.imag) > 0.0]
    if cplx.size != 2:
        raise ParameterError(
            f"expected a conjugate pair at the critical sensitivity, got roots {roots}"
        )
    report.hopf_frequency = float(np.max(np.abs(cplx.imag)))
    eps = 1e-5 * bc
    sp = _conjugate_pair_real_part(p, k0, bc + eps)
    sm = _conjugate_pair_real_part(p, k0, bc - eps)
    report.transversality_slope = (sp - sm) / (2.0 * eps)
    return report
