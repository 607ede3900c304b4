"""Orthogonal polynomials, Stieltjes transforms and Gauss-quadrature spectral measures."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from . import _kernels
from .errors import ConfigurationError, ConsistencyError, NumericError, PoleProximityError
from .jacobi import JacobiSequence, Mode

log = logging.getLogger(__name__)

WEIGHT_TOL = 1e-10
CF_RATIONAL_TOL = 1e-12
PRUNE_BELOW = 1e-14


class Family(str, Enum):
    P = "P"
    Q1 = "Q1"


@dataclass(frozen=True)
class PolynomialSequence:
    """``coeffs[n][j]`` is the coefficient of x**j in the degree-n member."""

    family: Family
    coeffs: tuple[tuple[Fraction, ...], ...]

    def __getitem__(self, n: int) -> tuple[Fraction, ...]:
        return self.coeffs[n]

    def __len__(self) -> int:
        return len(self.coeffs)

    def evaluate(self, n: int, x):
        out = np.zeros_like(np.asarray(x, dtype=np.result_type(x, np.float64)))
        for c in reversed(self.coeffs[n]):
            out = out * x + float(c)
        return out


def poly_recurrence(jac: JacobiSequence, n: int, family="P") -> PolynomialSequence:
    """Monic P_0..P_n (or the associated Q_0^(1)..Q_n^(1)) with rational coefficients."""
    family = Family(family)
    shift = 0 if family is Family.P else 1
    if n < 0 or n + shift > jac.n_levels:
        raise ConfigurationError(
            f"degree {n} of family {family.value} needs {n + shift} levels, "
            f"only {jac.n_levels} available"
        )
    alpha = jac.alpha[shift:]
    omega = jac.omega[shift:]
    polys: list[list[Fraction]] = [[Fraction(1)]]
    if n >= 1:
        polys.append([-alpha[0], Fraction(1)])
    for j in range(1, n):
        # x p_j - alpha_{j+1} p_j - omega_j p_{j-1}
        nxt = [Fraction(0)] + polys[j]
        for i, c in enumerate(polys[j]):
            nxt[i] -= alpha[j] * c
        for i, c in enumerate(polys[j - 1]):
            nxt[i] -= omega[j - 1] * c
        polys.append(nxt)
    return PolynomialSequence(family, tuple(tuple(p) for p in polys))


def rational_form(jac: JacobiSequence, n: int | None = None):
    """Coefficients of (Q_{n-1}^(1), P_n) so that G(z) = Q_{n-1}^(1)(z) / P_n(z)."""
    n = jac.n_levels if n is None else n
    num = poly_recurrence(jac, n - 1, Family.Q1)[n - 1]
    den = poly_recurrence(jac, n, Family.P)[n]
    return num, den


def _levels(jac: JacobiSequence, depth: int | None) -> int:
    depth = jac.n_levels if depth is None else int(depth)
    if not 1 <= depth <= jac.n_levels:
        raise ConfigurationError(f"depth {depth} outside 1..{jac.n_levels}")
    return depth


def stieltjes_cf(jac: JacobiSequence, z, depth: int | None = None):
    """Bottom-up J-fraction 1/(z - a1 - w1/(z - a2 - w2/(...)))."""
    depth = _levels(jac, depth)
    zz = np.asarray(z, dtype=np.complex128)
    vals, floored = _kernels.jfrac(
        jac.alpha_array()[:depth], jac.omega_array()[: depth - 1], zz.ravel()
    )
    if floored.any():
        bad = zz.ravel()[floored][0]
        atoms = gauss_measure(jac, depth).locations
        nearest = float(atoms[np.argmin(np.abs(atoms - bad))])
        raise PoleProximityError(
            f"z={bad} sits on the atom x={nearest!r} of the depth-{depth} measure",
            nearest_atom=nearest,
        )
    if not np.all(np.isfinite(vals)):
        raise NumericError("continued fraction produced non-finite values")
    vals = vals.reshape(zz.shape)
    return complex(vals) if vals.ndim == 0 else vals


def _scaled_pair(jac: JacobiSequence, n: int, x):
    """(q*, p*, p*') with Q_{n-1}/P_n = q*/(sqrt(w1) p*), overflow-free."""
    diag, off = jac.jacobi_matrix(n)
    p, dp = _kernels.scaled_recurrence(diag, off, x)
    if n == 1:
        return np.ones_like(p), p, dp, 1.0
    q, _ = _kernels.scaled_recurrence(diag[1:], off[1:], x)
    return q, p, dp, off[0]


def stieltjes_rational(jac: JacobiSequence, z, n: int | None = None):
    """Q_{n-1}^(1)(z) / P_n(z) via normalised recurrences."""
    n = _levels(jac, n)
    zz = np.asarray(z, dtype=np.complex128)
    q, p, _, s = _scaled_pair(jac, n, zz.ravel())
    vals = (q / (s * p)).reshape(zz.shape)
    return complex(vals) if vals.ndim == 0 else vals


@dataclass(frozen=True, eq=False)
class SpectralMeasure:
    locations: np.ndarray
    weights: np.ndarray
    mode: Mode | None = None
    k: int | None = None
    n: int | None = None

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.locations.tolist(), self.weights.tolist()))

    def stieltjes(self, z):
        zz = np.asarray(z, dtype=np.complex128)
        vals = (self.weights / (zz[..., None] - self.locations)).sum(axis=-1)
        return complex(vals) if vals.ndim == 0 else vals

    def integrate(self, f):
        return np.sum(self.weights * f(self.locations))

    def to_dict(self) -> dict:
        return {
            "mode": None if self.mode is None else self.mode.value,
            "k": self.k,
            "n": self.n,
            "atoms": [{"x": x, "w": w} for x, w in self.atoms],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "SpectralMeasure":
        atoms = data["atoms"]
        return cls(
            locations=np.array([a["x"] for a in atoms], dtype=np.float64),
            weights=np.array([a["w"] for a in atoms], dtype=np.float64),
            mode=None if data.get("mode") is None else Mode(data["mode"]),
            k=data.get("k"),
            n=data.get("n"),
        )


def gauss_measure(
    jac: JacobiSequence,
    n: int | None = None,
    weight_tol: float = WEIGHT_TOL,
    prune_below: float = PRUNE_BELOW,
) -> SpectralMeasure:
    """Golub-Welsch nodes and weights, cross-checked against Q_{n-1}^(1)/P_n'."""
    n = _levels(jac, n)
    diag, off = jac.jacobi_matrix(n)
    try:
        if n == 1:
            x, vecs = diag.copy(), np.ones((1, 1))
        else:
            x, vecs = eigh_tridiagonal(diag, off)
    except LinAlgError as exc:
        raise NumericError(f"tridiagonal eigensolver failed: {exc}") from exc
    w_eig = vecs[0] ** 2

    q, _, dp, s = _scaled_pair(jac, n, x.astype(np.complex128))
    w_res = (q / (s * dp)).real
    gap = float(np.max(np.abs(w_eig - w_res)))
    if not gap <= weight_tol:
        raise ConsistencyError(
            f"eigenvector and residue weights differ by {gap:.3e} (> {weight_tol:.0e})"
        )
    if np.any(np.diff(x) <= 0):
        raise ConsistencyError("atom locations are not strictly increasing")

    keep = w_eig >= prune_below
    if not keep.all():
        log.warning("pruning %d atoms with weight below %g", int((~keep).sum()), prune_below)
        x, w_eig = x[keep], w_eig[keep]
    return SpectralMeasure(locations=x, weights=w_eig, mode=jac.mode, k=jac.k, n=n)


def moments(measure: SpectralMeasure, m_max: int) -> np.ndarray:
    """Power moments of the measure for orders 0..m_max."""
    powers = measure.locations[None, :] ** np.arange(m_max + 1)[:, None]
    return powers @ measure.weights
