"""Spatial domains: a 1D interval or a 2D axis-aligned rectangle.

Both carry homogeneous Neumann (no-flux) boundaries everywhere in this
package; the domain object itself only stores the extents.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParameterError


@dataclass(frozen=True)
class Interval:
    length: float

    def __post_init__(self) -> None:
        if not (self.length > 0.0 and self.length < float("inf")):
            raise ParameterError(f"interval length must be positive and finite, got {self.length}")

    @property
    def ndim(self) -> int:
        return 1


@dataclass(frozen=True)
class Rectangle:
    lx: float
    ly: float

    def __post_init__(self) -> None:
        for name, value in (("lx", self.lx), ("ly", self.ly)):
            if not (value > 0.0 and value < float("inf")):
                raise ParameterError(f"rectangle {name} must be positive and finite, got {value}")

    @property
    def ndim(self) -> int:
        return 2


Geometry = Interval | Rectangle
