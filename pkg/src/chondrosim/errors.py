"""Exception types shared across the package."""

from __future__ import annotations


class ParameterError(ValueError):
    """A model or mesoscopic parameter is outside its admissible domain."""


class ConfigError(ValueError):
    """A run configuration document is malformed or violates the schema."""


class SolveError(RuntimeError):
    """A linear solve failed to reach the requested tolerance."""

    def __init__(self, message: str, residual: float | None = None, iterations: int | None = None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class DivergenceError(RuntimeError):
    """The time integration produced non-finite values."""

    def __init__(self, message: str, step: int | None = None, t: float | None = None):
        super().__init__(message)
        self.step = step
        self.t = t
