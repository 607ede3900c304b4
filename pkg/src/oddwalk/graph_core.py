"""Odd graphs O_k: construction, distances, stratification, intersection numbers.

Vertices of O_k are the (k-1)-subsets of S = {1, ..., 2k-1}, stored as
bitmasks (element j <-> bit j-1).  Two vertices are adjacent iff their masks
are disjoint.

Index convention for intersection numbers: for a vertex at distance i from
the reference vertex, ``b[i]`` counts its neighbours at distance i-1,
``a[i]`` those at distance i, and ``c[i]`` those at distance i+1.  This is
the reverse of the usual Brouwer-Cohen-Neumaier naming (where b is the
outward count) and is used consistently throughout the package, so
``b[0] = 0``, ``c[d] = 0`` and ``omega_i = c[i-1] * b[i]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .errors import ConfigurationError, InvariantViolation

K_MAX = 8


@dataclass(frozen=True, eq=False)
class OddGraph:
    k: int
    vertices: np.ndarray
    indptr: np.ndarray = field(repr=False)
    indices: np.ndarray = field(repr=False)

    @property
    def ground_set_size(self) -> int:
        return 2 * self.k - 1

    @property
    def vertex_count(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def edge_count(self) -> int:
        return int(self.indices.shape[0]) // 2

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def index_of(self, mask: int) -> int:
        i = int(np.searchsorted(self.vertices, mask))
        if i >= self.vertex_count or int(self.vertices[i]) != mask:
            raise KeyError(f"{mask:#b} is not a vertex of O_{self.k}")
        return i

    def subset(self, v: int) -> tuple[int, ...]:
        """Elements of S (1-based) making up vertex ``v``."""
        m = int(self.vertices[v])
        return tuple(j + 1 for j in range(self.ground_set_size) if m >> j & 1)

    def adjacency_sparse(self) -> sp.csr_matrix:
        n = self.vertex_count
        data = np.ones(self.indices.shape[0], dtype=np.int64)
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(n, n))

    def adjacency_dense(self, dtype=np.float64) -> np.ndarray:
        return self.adjacency_sparse().toarray().astype(dtype)


@dataclass(frozen=True, eq=False)
class Stratification:
    origin: int
    strata: tuple[np.ndarray, ...]
    level: np.ndarray = field(repr=False)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(int(s.shape[0]) for s in self.strata)

    @property
    def diameter(self) -> int:
        return len(self.strata) - 1


@dataclass(frozen=True)
class IntersectionNumbers:
    """Tridiagonal slice of the intersection array (see module docstring)."""

    k: int
    a: tuple[int, ...]
    b: tuple[int, ...]
    c: tuple[int, ...]
    shell_sizes: tuple[int, ...]

    @property
    def d(self) -> int:
        return len(self.a) - 1

    def validate(self) -> None:
        d = self.d
        if not (len(self.b) == len(self.c) == len(self.shell_sizes) == d + 1):
            raise InvariantViolation("intersection arrays have mismatched lengths")
        if self.b[0] != 0 or self.c[d] != 0:
            raise InvariantViolation("boundary convention b_0 = c_d = 0 violated")
        for i in range(d + 1):
            if min(self.a[i], self.b[i], self.c[i]) < 0:
                raise InvariantViolation(f"negative intersection number at level {i}")
            if self.a[i] + self.b[i] + self.c[i] != self.k:
                raise InvariantViolation(f"b_{i} + a_{i} + c_{i} != k")
        if d >= 1 and self.b[1] < 1:
            raise InvariantViolation("graph is not connected (b_1 = 0)")
        for i in range(d):
            # edges between shells i and i+1, counted from both sides
            if self.shell_sizes[i] * self.c[i] != self.shell_sizes[i + 1] * self.b[i + 1]:
                raise InvariantViolation(f"shell sizes inconsistent at level {i}")


def _check_k(k, k_min: int = 2, k_max: int | None = None) -> int:
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)):
        raise ConfigurationError(f"k must be an integer, got {k!r}")
    k = int(k)
    if k < k_min:
        raise ConfigurationError(f"k must be >= {k_min}, got {k}")
    if k_max is not None and k > k_max:
        raise ConfigurationError(
            f"k={k} exceeds K_MAX={k_max} for full graph construction "
            f"({comb(2 * k - 1, k - 1)} vertices)"
        )
    return k


def build_odd_graph(k: int, k_max: int = K_MAX) -> OddGraph:
    """Enumerate O_k with vertices sorted ascending by bitmask."""
    k = _check_k(k, k_max=k_max)
    masks = sorted(
        sum(1 << j for j in sub) for sub in combinations(range(2 * k - 1), k - 1)
    )
    vertices = np.array(masks, dtype=np.int64)
    indptr, indices = _kernels.disjoint_csr(vertices)
    graph = OddGraph(k=k, vertices=vertices, indptr=indptr, indices=indices)
    if graph.vertex_count != comb(2 * k - 1, k - 1):
        raise InvariantViolation("vertex count differs from C(2k-1, k-1)")
    if not np.all(graph.degrees == k):
        raise InvariantViolation(f"O_{k} is not {k}-regular")
    return graph


def _check_vertex(graph: OddGraph, v) -> int:
    v = int(v)
    if not 0 <= v < graph.vertex_count:
        raise IndexError(f"vertex index {v} out of range [0, {graph.vertex_count})")
    return v


def distances_from(graph: OddGraph, origin: int) -> np.ndarray:
    origin = _check_vertex(graph, origin)
    return _kernels.bfs(graph.indptr, graph.indices, origin)


def all_pairs_distances(graph: OddGraph) -> np.ndarray:
    return _kernels.all_pairs(graph.indptr, graph.indices)


def distance(graph: OddGraph, u: int, v: int) -> int:
    v = _check_vertex(graph, v)
    return int(distances_from(graph, u)[v])


def epsilon(n: int, k: int) -> int:
    """Size of |u & v| for two vertices of O_k at distance n."""
    return k - 1 - n // 2 if n % 2 == 0 else (n - 1) // 2


def distance_via_intersection(graph: OddGraph, u: int, v: int) -> int:
    """Distance read off from the overlap size alone, without any search."""
    u, v = _check_vertex(graph, u), _check_vertex(graph, v)
    if u == v:
        raise ConfigurationError("distance_via_intersection requires u != v")
    overlap = (int(graph.vertices[u]) & int(graph.vertices[v])).bit_count()
    hits = [n for n in range(1, graph.k) if epsilon(n, graph.k) == overlap]
    if len(hits) != 1:
        raise InvariantViolation(
            f"overlap {overlap} matches distances {hits} in O_{graph.k}"
        )
    return hits[0]


def stratify(graph: OddGraph, origin: int = 0) -> Stratification:
    """Partition vertices into distance shells around ``origin``.

    The default origin (index 0) is the lexicographically smallest subset
    {1, ..., k-1}, which has the smallest bitmask.
    """
    level = distances_from(graph, origin)
    if np.any(level < 0):
        raise InvariantViolation("graph is disconnected")
    d = int(level.max())
    order = np.argsort(level, kind="stable")
    bounds = np.searchsorted(level[order], np.arange(d + 2))
    strata = tuple(order[bounds[i]:bounds[i + 1]] for i in range(d + 1))
    return Stratification(origin=int(origin), strata=strata, level=level)


def intersection_numbers(graph: OddGraph, strat: Stratification) -> IntersectionNumbers:
    """Count shell transitions for every vertex and check they depend only on the shell."""
    level = strat.level
    n = graph.vertex_count
    rows = np.repeat(np.arange(n), graph.degrees)
    step = level[graph.indices] - level[rows]
    if np.any(np.abs(step) > 1):
        raise InvariantViolation("edge jumps more than one shell")
    counts = np.zeros((n, 3), dtype=np.int64)
    np.add.at(counts, (rows, step + 1), 1)
    a, b, c = [], [], []
    for i, members in enumerate(strat.strata):
        rows_i = np.unique(counts[members], axis=0)
        if rows_i.shape[0] != 1:
            raise InvariantViolation(
                f"not distance-regular: shell {i} has transition counts {rows_i.tolist()}"
            )
        down, same, up = (int(x) for x in rows_i[0])
        b.append(down)
        a.append(same)
        c.append(up)
    inter = IntersectionNumbers(
        k=graph.k, a=tuple(a), b=tuple(b), c=tuple(c), shell_sizes=strat.sizes
    )
    inter.validate()
    return inter


def closed_form_intersection(k: int) -> IntersectionNumbers:
    """Intersection numbers of O_k from the closed forms; no graph is built."""
    k = _check_k(k)
    d = k - 1
    b = [0] + [(i + 1) // 2 for i in range(1, d + 1)]
    c = [k - (i + 1) // 2 for i in range(d)] + [0]
    a = [k - b[i] - c[i] for i in range(d + 1)]
    sizes = [1]
    for i in range(d):
        num = sizes[i] * c[i]
        if num % b[i + 1]:
            raise InvariantViolation(f"non-integral shell size at level {i + 1}")
        sizes.append(num // b[i + 1])
    inter = IntersectionNumbers(
        k=k, a=tuple(a), b=tuple(b), c=tuple(c), shell_sizes=tuple(sizes)
    )
    inter.validate()
    return inter
