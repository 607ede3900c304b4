"""Szego-Jacobi sequences and the quantum decomposition A = A+ + A- + A0.

Three flavours of Jacobi sequence are produced:

``paper``
    omega from the odd-graph closed forms and alpha identically zero, as
    published.
``exact``
    same omega, but alpha_{i+1} = a_i, so the last diagonal entry carries
    the boundary term a_d.  This is the true restriction of A to the span
    of the stratum vectors and agrees with brute force.
``limit``
    omega = 1, 1, 2, 2, 3, 3, ... and alpha = 0, the k -> infinity limit of
    omega_i / k.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from .errors import ConfigurationError, InvariantViolation
from .graph_core import IntersectionNumbers, OddGraph, Stratification


class Mode(str, Enum):
    PAPER = "paper"
    EXACT = "exact"
    LIMIT = "limit"

    @classmethod
    def parse(cls, value) -> "Mode":
        try:
            return cls(value)
        except ValueError:
            raise ConfigurationError(
                f"unknown mode {value!r}; expected one of {[m.value for m in cls]}"
            ) from None


@dataclass(frozen=True)
class JacobiSequence:
    """omega_1..omega_n and alpha_1..alpha_{n+1}, stored as exact rationals."""

    mode: Mode
    k: int | None
    omega: tuple[Fraction, ...]
    alpha: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.alpha) != len(self.omega) + 1:
            raise InvariantViolation("need exactly one more alpha than omega")
        if any(w <= 0 for w in self.omega):
            raise InvariantViolation("omega must be strictly positive")

    @property
    def n_levels(self) -> int:
        return len(self.alpha)

    def omega_array(self) -> np.ndarray:
        return np.array([float(w) for w in self.omega], dtype=np.float64)

    def alpha_array(self) -> np.ndarray:
        return np.array([float(a) for a in self.alpha], dtype=np.float64)

    def jacobi_matrix(self, n: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        """(diagonal, off-diagonal) of the n x n Jacobi matrix."""
        n = self.n_levels if n is None else n
        if not 1 <= n <= self.n_levels:
            raise ConfigurationError(f"n={n} outside 1..{self.n_levels}")
        return self.alpha_array()[:n], np.sqrt(self.omega_array()[: n - 1])

    def truncate(self, n_levels: int) -> "JacobiSequence":
        if not 1 <= n_levels <= self.n_levels:
            raise ConfigurationError(f"cannot truncate {self.n_levels} levels to {n_levels}")
        return JacobiSequence(
            self.mode, self.k, self.omega[: n_levels - 1], self.alpha[:n_levels]
        )

    def to_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "k": self.k,
            "omega": [_num(w) for w in self.omega],
            "alpha": [_num(a) for a in self.alpha],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "JacobiSequence":
        return cls(
            mode=Mode.parse(data["mode"]),
            k=data.get("k"),
            omega=tuple(Fraction(w) for w in data["omega"]),
            alpha=tuple(Fraction(a) for a in data["alpha"]),
        )


def _num(q: Fraction):
    return int(q) if q.denominator == 1 else float(q)


def omega_closed_form(i: int, k: int) -> int:
    """omega_i of O_k straight from the published odd/even formulas."""
    if i % 2:
        return (i + 1) // 2 * (k - (i - 1) // 2)
    return i // 2 * (k - i // 2)


def jacobi_from_intersection(inter: IntersectionNumbers, mode="exact") -> JacobiSequence:
    mode = Mode.parse(mode)
    if mode is Mode.LIMIT:
        raise ConfigurationError("use jacobi_limit for the limit sequence")
    d = inter.d
    omega = tuple(Fraction(inter.c[i - 1] * inter.b[i]) for i in range(1, d + 1))
    if mode is Mode.PAPER:
        alpha = (Fraction(0),) * (d + 1)
    else:
        alpha = tuple(Fraction(x) for x in inter.a)
    return JacobiSequence(mode=mode, k=inter.k, omega=omega, alpha=alpha)


def jacobi_paper(k: int) -> JacobiSequence:
    """Paper-mode sequence evaluated from the omega formulas directly."""
    if k < 2:
        raise ConfigurationError(f"k must be >= 2, got {k}")
    omega = tuple(Fraction(omega_closed_form(i, k)) for i in range(1, k))
    return JacobiSequence(Mode.PAPER, k, omega, (Fraction(0),) * k)


def jacobi_limit(n_levels: int) -> JacobiSequence:
    """omega_1..omega_n = 1, 1, 2, 2, ...; alpha_1..alpha_{n+1} = 0."""
    if n_levels < 1:
        raise ConfigurationError(f"n_levels must be >= 1, got {n_levels}")
    omega = tuple(Fraction((i + 1) // 2) for i in range(1, n_levels + 1))
    return JacobiSequence(Mode.LIMIT, None, omega, (Fraction(0),) * (n_levels + 1))


@dataclass(frozen=True, eq=False)
class QuantumDecomposition:
    a_plus: sp.csr_matrix
    a_minus: sp.csr_matrix
    a_zero: sp.csr_matrix


def quantum_decompose(graph: OddGraph, strat: Stratification) -> QuantumDecomposition:
    """Split A by how the row vertex's shell compares to the column vertex's."""
    adj = graph.adjacency_sparse().tocoo()
    step = strat.level[adj.row] - strat.level[adj.col]
    n = graph.vertex_count

    def part(mask):
        return sp.csr_matrix(
            (adj.data[mask], (adj.row[mask], adj.col[mask])), shape=(n, n)
        )

    return QuantumDecomposition(
        a_plus=part(step == 1), a_minus=part(step == -1), a_zero=part(step == 0)
    )


@dataclass
class LadderReport:
    max_deviation: list[tuple[float, float, float]]
    tolerance: float

    @property
    def ok(self) -> bool:
        return all(max(row) <= self.tolerance for row in self.max_deviation)


def stratum_vector(strat: Stratification, i: int, n: int) -> np.ndarray:
    v = np.zeros(n)
    members = strat.strata[i]
    v[members] = 1.0 / np.sqrt(members.shape[0])
    return v


def verify_ladder_action(
    qd: QuantumDecomposition,
    strat: Stratification,
    jac: JacobiSequence,
    tol: float = 1e-12,
    strict: bool = True,
) -> LadderReport:
    """Check A+, A-, A0 act on the stratum vectors with coefficients sqrt(omega), alpha.

    Per level i the report holds the max-norm deviation of (A+, A-, A0).
    """
    if jac.mode is not Mode.EXACT:
        raise ConfigurationError("ladder action is only exact for mode='exact'")
    n = qd.a_plus.shape[0]
    d = strat.diameter
    if jac.n_levels != d + 1:
        raise ConfigurationError("Jacobi sequence and stratification disagree on depth")
    omega, alpha = jac.omega_array(), jac.alpha_array()
    phi = [stratum_vector(strat, i, n) for i in range(d + 1)]
    zero = np.zeros(n)
    rows = []
    for i in range(d + 1):
        up = np.sqrt(omega[i]) * phi[i + 1] if i < d else zero
        down = np.sqrt(omega[i - 1]) * phi[i - 1] if i > 0 else zero
        same = alpha[i] * phi[i]
        rows.append((
            float(np.max(np.abs(qd.a_plus @ phi[i] - up))),
            float(np.max(np.abs(qd.a_minus @ phi[i] - down))),
            float(np.max(np.abs(qd.a_zero @ phi[i] - same))),
        ))
    report = LadderReport(rows, tol)
    if strict and not report.ok:
        raise InvariantViolation(f"ladder action deviates beyond {tol}: {rows}")
    return report
