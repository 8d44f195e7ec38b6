"""Kernel selection: compiled extension when available, numpy fallback else.

`rref_inplace(a, p, pivots)` reduces an int64 matrix mod p in place and
returns its rank; `BACKEND` records which implementation got picked.
"""

try:
    from ._fastrref import rref_inplace
    BACKEND = "cython"
except ImportError:  # pragma: no cover - depends on build environment
    from .pyref import rref_inplace
    BACKEND = "python"

__all__ = ["rref_inplace", "BACKEND"]
