"""Backend selection for the integer kernels.

The compiled extension is used when it imported successfully and every
argument fits a signed 64-bit word; otherwise the pure-Python twin runs.
Set ``INVOLUTION_EMBED_PURE=1`` to force the fallback.
"""

import os

from . import _kernels_py as _py

_WORD = 2**62

try:
    if os.environ.get("INVOLUTION_EMBED_PURE"):
        raise ImportError("pure backend forced")
    from . import _kernels as _c  # type: ignore[attr-defined]
    BACKEND = "compiled"
except ImportError:
    _c = None
    BACKEND = "python"


def _small(*xs) -> bool:
    return all(-_WORD < x < _WORD for x in xs)


def jacobi(a: int, n: int) -> int:
    if _c is not None and _small(a, n):
        return _c.jacobi(a, n)
    return _py.jacobi(a, n)


def trial_factor(n: int, bound: int):
    if _c is not None and _small(n, bound * bound):
        return _c.trial_factor(n, bound)
    return _py.trial_factor(n, bound)


def primes_below(n: int) -> list:
    if _c is not None and n < _WORD:
        return _c.primes_below(n)
    return _py.primes_below(n)


def scan_legendre_pattern(values, signs, start: int, limit: int, avoid=frozenset()):
    if _c is not None and _small(limit * limit, *values):
        return _c.scan_legendre_pattern(list(values), list(signs), start, limit, frozenset(avoid))
    return _py.scan_legendre_pattern(values, signs, start, limit, avoid)
