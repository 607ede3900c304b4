"""Growing-k limit of the walk on O_k: limit measure |x| exp(-x^2) and its amplitudes."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import ConfigurationError
from .graph_core import closed_form_intersection
from .jacobi import Mode, jacobi_from_intersection, jacobi_limit
from .spectral import SpectralMeasure, gauss_measure, stieltjes_cf
from .special import dawson, erf_imag_gauss

log = logging.getLogger(__name__)

SQRT_PI = math.sqrt(math.pi)
LIMIT_LEVELS = 160
MAX_LIMIT_LEVELS = 4000


@dataclass(frozen=True)
class LimitMeasure:
    truncation_radius: float = 8.0

    @staticmethod
    def density(x):
        x = np.asarray(x, dtype=np.float64)
        return np.abs(x) * np.exp(-x * x)

    @staticmethod
    def quadrature_rule(n: int = LIMIT_LEVELS) -> SpectralMeasure:
        return limit_rule(n)


@lru_cache(maxsize=16)
def limit_rule(n: int) -> SpectralMeasure:
    """n-point Gauss rule for |x| exp(-x^2), from omega = 1, 1, 2, 2, ..."""
    if not 1 <= n <= MAX_LIMIT_LEVELS:
        raise ConfigurationError(f"limit rule size {n} outside 1..{MAX_LIMIT_LEVELS}")
    return gauss_measure(jacobi_limit(n), n, prune_below=0.0)


def _as_result(values, t):
    return complex(values) if np.ndim(t) == 0 else values


def q0_limit(t):
    """Return amplitude at the starting vertex: 1 - t D(t/2), real for real t."""
    t_arr = np.asarray(t, dtype=np.float64)
    val = 1.0 - t_arr * dawson(t_arr / 2.0)
    return float(val) if np.ndim(t) == 0 else np.asarray(val)


def qm_limit_closed(m: int, t):
    """Closed forms for m <= 3 with erf(it/2) exp(-t^2/4) routed through Dawson."""
    t = np.asarray(t, dtype=np.float64)
    e = erf_imag_gauss(t)
    if m == 0:
        val = 1j * SQRT_PI * t / 2 * e + 1
    elif m == 1:
        val = SQRT_PI / 4 * (t**2 - 2) * e - 1j * t / 2
    elif m == 2:
        val = (-1j * SQRT_PI * t**3 * e - 2 * t**2 + 2j * SQRT_PI * t * e) / 8
    elif m == 3:
        val = (
            -SQRT_PI * t**4 * e + 2j * t**3 + 4 * SQRT_PI * t**2 * e
            - 4j * t + 4 * SQRT_PI * e
        ) / (16 * math.sqrt(2))
    else:
        raise ConfigurationError(f"closed forms exist for m in 0..3, got {m}")
    return _as_result(np.asarray(val, dtype=np.complex128), t)


def qm_limit_quadrature(m: int, t, n_levels: int | None = None):
    """Integrate exp(-ixt) p_m(x) against the limit measure with a Gauss rule.

    ``p_m`` is the orthonormal polynomial, i.e. P_m / sqrt(omega_1 ... omega_m).
    """
    if m < 0:
        raise ConfigurationError(f"m must be >= 0, got {m}")
    n = max(LIMIT_LEVELS, m + 40) if n_levels is None else int(n_levels)
    if n < m + 1:
        raise ConfigurationError(f"{n} levels cannot resolve stratum {m}")
    if n > MAX_LIMIT_LEVELS:
        raise ConfigurationError(f"stratum {m} needs more than {MAX_LIMIT_LEVELS} levels")
    rule = limit_rule(n)
    tt = np.atleast_1d(np.asarray(t, dtype=np.float64))
    x = rule.locations
    p_prev, p = np.zeros_like(x), np.ones_like(x)
    for j in range(1, m + 1):
        w_j = (j + 1) // 2
        w_prev = j // 2
        p_prev, p = p, (x * p - math.sqrt(w_prev) * p_prev) / math.sqrt(w_j)
    vals = (rule.weights * p) @ np.exp(-1j * np.outer(x, tt))
    return complex(vals[0]) if np.ndim(t) == 0 else vals


def q_limit(m: int, t):
    """Limit amplitude; closed form where one exists, quadrature otherwise."""
    return qm_limit_closed(m, t) if m <= 3 else qm_limit_quadrature(m, t)


def normalization(m: int) -> float:
    """sqrt(omega_1 ... omega_m) for the limit sequence."""
    return math.sqrt(math.prod((j + 1) // 2 for j in range(1, m + 1)))


def stieltjes_limit(z, depth: int = 500):
    return stieltjes_cf(jacobi_limit(depth), z, depth)


@dataclass(frozen=True)
class ConvergenceRow:
    k: int
    m: int
    t: float
    finite: complex
    limit: complex

    @property
    def gap(self) -> float:
        return abs(self.finite - self.limit)


@dataclass
class ConvergenceTable:
    rows: list[ConvergenceRow]

    @property
    def gaps(self) -> list[float]:
        return [r.gap for r in self.rows]

    @property
    def monotone(self) -> bool:
        g = self.gaps
        return all(b < a for a, b in zip(g, g[1:]))


def finite_rescaled_amplitude(k: int, m: int, t: float, mode="exact") -> complex:
    """<phi_m| exp(-i t A_k / sqrt(k)) |phi_0> on the k-level tridiagonal model."""
    jac = jacobi_from_intersection(closed_form_intersection(k), Mode.parse(mode))
    if m >= jac.n_levels:
        raise ConfigurationError(f"O_{k} has only {jac.n_levels} strata")
    diag, off = jac.jacobi_matrix()
    scale = 1.0 / math.sqrt(k)
    evals, vecs = eigh_tridiagonal(diag * scale, off * scale)
    return complex(np.sum(vecs[m] * vecs[0] * np.exp(-1j * evals * t)))


def convergence_experiment(k_list, m: int, t: float, mode="exact") -> ConvergenceTable:
    k_list = [int(k) for k in k_list]
    floor = max(3, m + 1)
    bad = [k for k in k_list if k < floor]
    if bad:
        raise ConfigurationError(f"k values {bad} below the minimum {floor} for m={m}")
    limit = complex(q_limit(m, t))
    table = ConvergenceTable([
        ConvergenceRow(k, m, float(t), finite_rescaled_amplitude(k, m, t, mode), limit)
        for k in k_list
    ])
    if not table.monotone:
        log.warning("gap sequence is not strictly decreasing: %s", table.gaps)
    return table
