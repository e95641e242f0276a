"""Uniform node-centered grids and the discrete spatial operators.

Nodes lie on the closed domain including its boundary, so dx = L/(N-1).
2D fields are indexed ``[iy, ix]`` (y varies along rows).  All operators
implement homogeneous Neumann boundaries; their trapezoid-weighted node
sums vanish identically, which is what makes the scheme conservative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .domain import Geometry, Interval, Rectangle
from .errors import ParameterError

__all__ = ["Grid", "FieldSet", "laplacian_neumann", "taxis_divergence_upwind", "total_mass"]


@dataclass(frozen=True)
class Grid:
    """Uniform node-centered grid over an interval or rectangle."""

    geometry: Geometry
    shape: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(n < 3 for n in self.shape):
            raise ParameterError(f"grids need at least 3 nodes per dimension, got shape {self.shape}")
        if isinstance(self.geometry, Interval) and len(self.shape) != 1:
            raise ParameterError("interval geometry requires a 1D shape")
        if isinstance(self.geometry, Rectangle) and len(self.shape) != 2:
            raise ParameterError("rectangle geometry requires a 2D shape")

    @classmethod
    def interval(cls, length: float, n: int) -> "Grid":
        return cls(Interval(length), (n,))

    @classmethod
    def rectangle(cls, lx: float, ly: float, nx: int, ny: int) -> "Grid":
        return cls(Rectangle(lx, ly), (ny, nx))

    @property
    def ndim(self) -> int:
        return len(self.shape)

    @property
    def dx(self) -> float:
        if isinstance(self.geometry, Interval):
            return self.geometry.length / (self.shape[0] - 1)
        return self.geometry.lx / (self.shape[1] - 1)

    @property
    def dy(self) -> float:
        if not isinstance(self.geometry, Rectangle):
            raise ParameterError("dy is only defined for rectangle grids")
        return self.geometry.ly / (self.shape[0] - 1)

    @property
    def x(self) -> np.ndarray:
        if isinstance(self.geometry, Interval):
            return np.linspace(0.0, self.geometry.length, self.shape[0])
        return np.linspace(0.0, self.geometry.lx, self.shape[1])

    @property
    def y(self) -> np.ndarray:
        if not isinstance(self.geometry, Rectangle):
            raise ParameterError("y coordinates are only defined for rectangle grids")
        return np.linspace(0.0, self.geometry.ly, self.shape[0])

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray]:
        """(X, Y) arrays shaped like a field, for rectangle grids."""
        return np.meshgrid(self.x, self.y)

    def quadrature_weights(self) -> np.ndarray:
        """Trapezoid weights, one per node, shaped like a field."""
        wx = np.full(self.shape[-1], self.dx)
        wx[0] = wx[-1] = 0.5 * self.dx
        if self.ndim == 1:
            return wx
        wy = np.full(self.shape[0], self.dy)
        wy[0] = wy[-1] = 0.5 * self.dy
        return wy[:, None] * wx[None, :]

    def check_field(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if u.shape != self.shape:
            raise ValueError(f"field shape {u.shape} does not match grid shape {self.shape}")
        return u


@dataclass
class FieldSet:
    """The discrete (c1, c2, h) triple on a grid."""

    c1: np.ndarray
    c2: np.ndarray
    h: np.ndarray

    def copy(self) -> "FieldSet":
        return FieldSet(self.c1.copy(), self.c2.copy(), self.h.copy())

    def all_finite(self) -> bool:
        return bool(
            np.all(np.isfinite(self.c1)) and np.all(np.isfinite(self.c2)) and np.all(np.isfinite(self.h))
        )


def laplacian_neumann(grid: Grid, u: np.ndarray) -> np.ndarray:
    """Central-difference Laplacian with ghost-node (reflection) boundaries."""
    u = grid.check_field(u)
    if grid.ndim == 1:
        return _kernels.laplacian_1d(u, grid.dx)
    return _kernels.laplacian_2d(u, grid.dx, grid.dy)


def taxis_divergence_upwind(grid: Grid, c1: np.ndarray, h: np.ndarray, b: float) -> np.ndarray:
    """-div(b c1 grad h) with first-order upwind fluxes and zero boundary flux.

    Face velocities are b times the face-centered gradient of h; each face
    flux takes the upstream c1 value.  Boundary cells have half width, so
    the weighted node sum of the output is exactly zero.
    """
    c1 = grid.check_field(c1)
    h = grid.check_field(h)
    if grid.ndim == 1:
        return _kernels.upwind_divergence_1d(c1, h, b, grid.dx)
    return _kernels.upwind_divergence_2d(c1, h, b, grid.dx, grid.dy)


def total_mass(grid: Grid, u: np.ndarray) -> float:
    """Trapezoid-rule integral of a field over the domain."""
    u = grid.check_field(u)
    return float(np.sum(grid.quadrature_weights() * u))
