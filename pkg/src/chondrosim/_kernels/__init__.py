"""Hot numerical kernels with a compiled core and a NumPy fallback.

The compiled extension (``_native``, built from ``_native.pyx``) is used
when importable; otherwise the NumPy implementations take over.  Set the
environment variable ``CHONDROSIM_KERNELS=numpy`` to force the fallback,
e.g. for benchmarking one against the other.
"""

from __future__ import annotations

import os

from . import _numpy

if os.environ.get("CHONDROSIM_KERNELS", "").lower() == "numpy":
    _impl = _numpy
else:
    try:
        from . import _native as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _numpy

BACKEND: str = _impl.BACKEND

thomas_solve = _impl.thomas_solve
laplacian_1d = _impl.laplacian_1d
laplacian_2d = _impl.laplacian_2d
upwind_divergence_1d = _impl.upwind_divergence_1d
upwind_divergence_2d = _impl.upwind_divergence_2d
weighted_laplacian_1d = _impl.weighted_laplacian_1d
weighted_laplacian_2d = _impl.weighted_laplacian_2d

__all__ = [
    "BACKEND",
    "thomas_solve",
    "laplacian_1d",
    "laplacian_2d",
    "upwind_divergence_1d",
    "upwind_divergence_2d",
    "weighted_laplacian_1d",
    "weighted_laplacian_2d",
]
