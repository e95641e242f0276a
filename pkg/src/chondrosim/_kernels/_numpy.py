"""NumPy/SciPy implementations of the hot stencil and solver kernels.

These are the reference implementations; a compiled twin with identical
signatures lives in ``_native.pyx``.  All operators assume node-centered
grids with boundary nodes on the domain edge and homogeneous Neumann
closure: diffusion uses ghost-node reflection, flux operators carry zero
flux through the boundary with half-width boundary cells, so the
trapezoid-weighted sum of every operator output telescopes to zero.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_banded

BACKEND = "numpy"


def thomas_solve(lower: np.ndarray, diag: np.ndarray, upper: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Direct solve of a tridiagonal system.

    ``lower[i]`` multiplies x[i-1] in row i (lower[0] ignored) and
    ``upper[i]`` multiplies x[i+1] (upper[-1] ignored).
    """
    n = diag.shape[0]
    ab = np.zeros((3, n))
    ab[0, 1:] = upper[:-1]
    ab[1, :] = diag
    ab[2, :-1] = lower[1:]
    # check_finite off: non-finite values propagate to the caller's
    # divergence check instead of raising here, matching the compiled twin.
    return solve_banded((1, 1), ab, rhs, check_finite=False)


def laplacian_1d(u: np.ndarray, dx: float) -> np.ndarray:
    out = np.empty_like(u)
    inv = 1.0 / (dx * dx)
    out[1:-1] = (u[:-2] - 2.0 * u[1:-1] + u[2:]) * inv
    out[0] = 2.0 * (u[1] - u[0]) * inv
    out[-1] = 2.0 * (u[-2] - u[-1]) * inv
    return out


def laplacian_2d(u: np.ndarray, dx: float, dy: float) -> np.ndarray:
    out = np.empty_like(u)
    invx = 1.0 / (dx * dx)
    out[:, 1:-1] = (u[:, :-2] - 2.0 * u[:, 1:-1] + u[:, 2:]) * invx
    out[:, 0] = 2.0 * (u[:, 1] - u[:, 0]) * invx
    out[:, -1] = 2.0 * (u[:, -2] - u[:, -1]) * invx
    invy = 1.0 / (dy * dy)
    out[1:-1, :] += (u[:-2, :] - 2.0 * u[1:-1, :] + u[2:, :]) * invy
    out[0, :] += 2.0 * (u[1, :] - u[0, :]) * invy
    out[-1, :] += 2.0 * (u[-2, :] - u[-1, :]) * invy
    return out


def _upwind_axis(c: np.ndarray, h: np.ndarray, b: float, dx: float, axis: int) -> np.ndarray:
    """Negative divergence of the upwind flux b*c*dh along one axis."""
    c = np.moveaxis(c, axis, -1)
    h = np.moveaxis(h, axis, -1)
    v = b * np.diff(h, axis=-1) / dx
    # Zero-velocity faces take the left state; the flux vanishes there anyway.
    flux = np.where(v > 0.0, v * c[..., :-1], v * c[..., 1:])
    out = np.empty_like(c)
    out[..., 1:-1] = -(flux[..., 1:] - flux[..., :-1]) / dx
    out[..., 0] = -flux[..., 0] / (0.5 * dx)
    out[..., -1] = flux[..., -1] / (0.5 * dx)
    return np.moveaxis(out, -1, axis)


def upwind_divergence_1d(c: np.ndarray, h: np.ndarray, b: float, dx: float) -> np.ndarray:
    return _upwind_axis(c, h, b, dx, axis=0)


def upwind_divergence_2d(c: np.ndarray, h: np.ndarray, b: float, dx: float, dy: float) -> np.ndarray:
    return _upwind_axis(c, h, b, dx, axis=1) + _upwind_axis(c, h, b, dy, axis=0)


def weighted_laplacian_1d(z: np.ndarray, face_w: np.ndarray, dx: float) -> np.ndarray:
    """div(w grad z) with prescribed face weights and zero boundary flux."""
    inv = 1.0 / (dx * dx)
    flux = face_w * (z[1:] - z[:-1])
    out = np.empty_like(z)
    out[1:-1] = (flux[1:] - flux[:-1]) * inv
    out[0] = 2.0 * flux[0] * inv
    out[-1] = -2.0 * flux[-1] * inv
    return out


def weighted_laplacian_2d(
    z: np.ndarray, face_wx: np.ndarray, face_wy: np.ndarray, dx: float, dy: float
) -> np.ndarray:
    invx = 1.0 / (dx * dx)
    fx = face_wx * (z[:, 1:] - z[:, :-1])
    out = np.empty_like(z)
    out[:, 1:-1] = (fx[:, 1:] - fx[:, :-1]) * invx
    out[:, 0] = 2.0 * fx[:, 0] * invx
    out[:, -1] = -2.0 * fx[:, -1] * invx
    invy = 1.0 / (dy * dy)
    fy = face_wy * (z[1:, :] - z[:-1, :])
    out[1:-1, :] += (fy[1:, :] - fy[:-1, :]) * invy
    out[0, :] += 2.0 * fy[0, :] * invy
    out[-1, :] += -2.0 * fy[-1, :] * invy
    return out
