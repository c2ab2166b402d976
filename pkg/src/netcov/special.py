"""Special functions used by the closed-form kernels."""

from __future__ import annotations

import numpy as np
from scipy import special as _sp

from .errors import DomainError

__all__ = ["erfc", "erfcx", "hyp2f1_special"]

# below this |x| the inverse-trig forms lose digits to cancellation
_SERIES_CUTOFF = 1e-4


def erfc(x):
    """Complementary error function."""
    return _sp.erfc(x)


def erfcx(x):
    """Scaled complementary error function ``exp(x**2) * erfc(x)``."""
    return _sp.erfcx(x)


def hyp2f1_special(x):
    """Gauss hypergeometric function 2F1(1, 1/2; 3/2; x) for x < 1.

    Uses ``atanh(sqrt(x))/sqrt(x)`` for positive ``x``, ``arctan(sqrt(-x))/sqrt(-x)``
    for negative ``x`` and the power series ``sum x**n / (2n + 1)`` near zero.
    """
    x_arr = np.asarray(x, dtype=float)
    if np.any(~(x_arr < 1.0)):
        raise DomainError("2F1(1, 1/2; 3/2; x) requires x < 1")
    out = np.empty_like(x_arr)
    small = np.abs(x_arr) < _SERIES_CUTOFF
    pos = (x_arr > 0) & ~small
    neg = (x_arr < 0) & ~small

    xs = x_arr[small]
    # terms up to x**4 leave a remainder below 1e-20 at the cutoff
    out[small] = 1.0 + xs * (1 / 3 + xs * (1 / 5 + xs * (1 / 7 + xs / 9)))
    r = np.sqrt(x_arr[pos])
    out[pos] = np.arctanh(r) / r
    r = np.sqrt(-x_arr[neg])
    out[neg] = np.arctan(r) / r
    return out if out.ndim else float(out)
