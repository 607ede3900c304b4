"""Dawson's function and the scaled imaginary error function built on it."""
from __future__ import annotations

import math

import numpy as np

from . import _kernels

_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)


def dawson(x):
    """D(x) = exp(-x^2) * integral_0^x exp(s^2) ds, accurate to a few ulp."""
    arr = np.asarray(x, dtype=np.float64)
    out = _kernels.dawson(arr.ravel()).reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def erfi_gauss(x):
    """erfi(x) * exp(-x^2) without forming either factor (no overflow)."""
    return _TWO_OVER_SQRT_PI * dawson(x)


def erf_imag_gauss(t):
    """erf(i t/2) * exp(-t^2/4) for real t; purely imaginary."""
    return 1j * erfi_gauss(np.asarray(t, dtype=np.float64) / 2.0)
