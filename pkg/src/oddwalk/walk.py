"""Continuous-time quantum walk amplitudes, spectral route and brute-force oracle.

The Hamiltonian is the adjacency matrix itself (hbar = 1).  On a regular
graph the Laplacian differs from A by a multiple of the identity, which
only contributes a global phase.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError

from . import _kernels
from .errors import ConfigurationError, NumericError
from .graph_core import OddGraph, Stratification, closed_form_intersection
from .jacobi import JacobiSequence, Mode
from .spectral import SpectralMeasure

CONSERVATION_TOL = 1e-10


def _amplitude_table(measure: SpectralMeasure, jac: JacobiSequence, t, m_max: int):
    """q_m(t) for m = 0..m_max as a (m_max + 1, len(t)) complex array."""
    n = measure.n if measure.n is not None else jac.n_levels
    if m_max < 0 or m_max >= n or m_max > len(jac.omega):
        raise ConfigurationError(f"stratum index {m_max} out of range for {n} levels")
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    diag = jac.alpha_array()[: m_max + 1]
    off = np.sqrt(jac.omega_array()[: max(m_max, 1)])
    polys = _kernels.orthonormal_table(diag, off, measure.locations, m_max)
    phases = np.exp(-1j * np.outer(measure.locations, t))
    return (polys * measure.weights) @ phases


def amplitude(measure: SpectralMeasure, jac: JacobiSequence, m: int, t):
    """q_m(t) = sum_l A_l exp(-i x_l t) P_m(x_l) / sqrt(omega_1 ... omega_m)."""
    if m < 0:
        raise ConfigurationError(f"stratum index must be >= 0, got {m}")
    row = _amplitude_table(measure, jac, t, m)[m]
    return complex(row[0]) if np.ndim(t) == 0 else row


@dataclass
class AmplitudeSeries:
    t_grid: np.ndarray
    q: np.ndarray  # shape (m_max + 1, len(t_grid))
    strata_sizes: tuple[int, ...] | None
    mode: Mode | None = None
    k: int | None = None
    conservation_error: np.ndarray = field(default=None, repr=False)
    tolerance: float = CONSERVATION_TOL

    @property
    def m_max(self) -> int:
        return self.q.shape[0] - 1

    @property
    def prob_stratum(self) -> np.ndarray:
        return np.abs(self.q) ** 2

    @property
    def conserved(self) -> bool:
        return bool(np.all(self.conservation_error <= self.tolerance))

    @property
    def breaches(self) -> np.ndarray:
        """Time indices where probability conservation failed."""
        return np.flatnonzero(self.conservation_error > self.tolerance)


def amplitude_series(
    measure: SpectralMeasure,
    jac: JacobiSequence,
    t_grid,
    m_max: int | None = None,
    tol: float = CONSERVATION_TOL,
    strata_sizes=None,
) -> AmplitudeSeries:
    t_grid = np.asarray(t_grid, dtype=np.float64).ravel()
    if not np.all(np.isfinite(t_grid)):
        raise ConfigurationError("time grid must be finite")
    if np.any(np.diff(t_grid) < 0):
        raise ConfigurationError("time grid must be sorted")
    n = measure.n if measure.n is not None else jac.n_levels
    m_full = min(n - 1, len(jac.omega))
    m_max = m_full if m_max is None else int(m_max)
    if not 0 <= m_max <= m_full:
        raise ConfigurationError(f"m_max={m_max} outside 0..{m_full}")
    full = _amplitude_table(measure, jac, t_grid, m_full)
    err = np.abs(np.sum(np.abs(full) ** 2, axis=0) - 1.0)
    if strata_sizes is None and jac.mode is not Mode.LIMIT and jac.k is not None:
        strata_sizes = closed_form_intersection(jac.k).shell_sizes[:n]
    return AmplitudeSeries(
        t_grid=t_grid,
        q=full[: m_max + 1],
        strata_sizes=None if strata_sizes is None else tuple(int(s) for s in strata_sizes),
        mode=jac.mode,
        k=jac.k,
        conservation_error=err,
        tolerance=tol,
    )


def vertex_probability(series: AmplitudeSeries, m: int, t_index: int) -> float:
    """Probability at one vertex of stratum m; amplitudes spread as q_m / sqrt(|V_m|)."""
    if series.strata_sizes is None:
        raise ConfigurationError("series has no finite strata (limit mode)")
    if not 0 <= m <= series.m_max:
        raise ConfigurationError(f"stratum {m} outside 0..{series.m_max}")
    return float(abs(series.q[m, t_index]) ** 2 / series.strata_sizes[m])


class WalkOracle:
    """exp(-iAt)|o> on the full vertex set from one dense eigendecomposition."""

    def __init__(self, graph: OddGraph, strat: Stratification):
        self.graph = graph
        self.strat = strat
        try:
            self.evals, self.evecs = np.linalg.eigh(graph.adjacency_dense())
        except LinAlgError as exc:
            raise NumericError(f"dense eigendecomposition failed: {exc}") from exc
        self._coeff = self.evecs[strat.origin].copy()

    def state(self, t) -> np.ndarray:
        """Vertex amplitudes; shape (vertex_count,) or (len(t), vertex_count)."""
        tt = np.atleast_1d(np.asarray(t, dtype=np.float64))
        phases = np.exp(-1j * np.outer(tt, self.evals)) * self._coeff
        psi = phases @ self.evecs.T
        return psi[0] if np.ndim(t) == 0 else psi

    def stratum_amplitudes(self, t) -> np.ndarray:
        psi = np.atleast_2d(self.state(t))
        out = np.stack(
            [psi[:, s].sum(axis=1) / np.sqrt(s.shape[0]) for s in self.strat.strata],
            axis=-1,
        )
        return out[0] if np.ndim(t) == 0 else out


def direct_oracle(graph: OddGraph, strat: Stratification, t) -> np.ndarray:
    """<phi_m| exp(-iAt) |phi_0> for m = 0..d by brute force."""
    return WalkOracle(graph, strat).stratum_amplitudes(t)
