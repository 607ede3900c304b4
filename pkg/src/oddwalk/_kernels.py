"""Hot inner loops, each in a numba and a pure-numpy flavour.

The numba path is used when numba imports cleanly and the environment
variable ``ODDWALK_DISABLE_NUMBA`` is unset (or ``0``).  Both flavours are
always importable as ``numba_impl`` / ``numpy_impl`` so they can be
compared directly by the tests and by ``benchmarks/bench_kernels.py``.
"""
from __future__ import annotations

import math
import os
from types import SimpleNamespace

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("ODDWALK_DISABLE_NUMBA", "0") in ("", "0")
BACKEND = "numba" if USE_NUMBA else "numpy"

# bottom-up J-fraction denominators smaller than this are clamped
CF_FLOOR = 1e-30
# Dawson: positive-term series below, asymptotic series above
DAWSON_SPLIT = 6.0
_EPS = np.finfo(np.float64).eps


# --------------------------------------------------------------------------
# pure numpy
# --------------------------------------------------------------------------

def _np_disjoint_csr(masks):
    masks = np.asarray(masks, dtype=np.int64)
    n = masks.shape[0]
    rows, cols = [], []
    block = max(1, 2**22 // max(n, 1))
    for start in range(0, n, block):
        hit = (masks[start:start + block, None] & masks[None, :]) == 0
        r, c = np.nonzero(hit)
        rows.append(r + start)
        cols.append(c)
    rows = np.concatenate(rows) if rows else np.zeros(0, np.int64)
    cols = np.concatenate(cols) if cols else np.zeros(0, np.int64)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
    return indptr, cols.astype(np.int64)


def _np_bfs(indptr, indices, origin):
    n = indptr.shape[0] - 1
    dist = np.full(n, -1, dtype=np.int64)
    dist[origin] = 0
    frontier = np.array([origin], dtype=np.int64)
    level = 0
    while frontier.size:
        starts = indptr[frontier]
        lens = indptr[frontier + 1] - starts
        total = int(lens.sum())
        if total == 0:
            break
        offs = np.repeat(starts - np.cumsum(lens) + lens, lens)
        nbrs = indices[offs + np.arange(total)]
        nbrs = np.unique(nbrs[dist[nbrs] < 0])
        level += 1
        dist[nbrs] = level
        frontier = nbrs
    return dist


def _np_all_pairs(indptr, indices):
    n = indptr.shape[0] - 1
    out = np.empty((n, n), dtype=np.int64)
    for s in range(n):
        out[s] = _np_bfs(indptr, indices, s)
    return out


def _np_jfrac(alpha, omega, z):
    z = np.asarray(z, dtype=np.complex128)
    depth = alpha.shape[0]
    g = z - alpha[depth - 1]
    floored = np.zeros(z.shape, dtype=np.bool_)
    for j in range(depth - 2, -1, -1):
        small = np.abs(g) < CF_FLOOR
        g = np.where(small, CF_FLOOR, g)
        g = z - alpha[j] - omega[j] / g
    floored = np.abs(g) < CF_FLOOR
    g = np.where(floored, CF_FLOOR, g)
    return 1.0 / g, floored


def _np_dawson(x):
    x = np.asarray(x, dtype=np.float64)
    ax = np.abs(x)
    out = np.empty_like(ax)
    lo = ax < DAWSON_SPLIT
    if lo.any():
        xl = ax[lo]
        x2 = xl * xl
        term = xl.copy()
        total = xl.copy()
        n = 0
        active = np.ones(xl.shape, dtype=np.bool_)
        while active.any() and n < 400:
            n += 1
            term = term * x2 / n * (2 * n - 1) / (2 * n + 1)
            total = np.where(active, total + term, total)
            active &= term > _EPS * total
        out[lo] = np.exp(-x2) * total
    hi = ~lo
    if hi.any():
        xh = ax[hi]
        inv = 1.0 / (2.0 * xh * xh)
        term = np.ones_like(xh)
        total = np.ones_like(xh)
        prev = np.full(xh.shape, np.inf)
        active = np.ones(xh.shape, dtype=np.bool_)
        n = 0
        while active.any() and n < 400:
            n += 1
            term = term * (2 * n - 1) * inv
            active &= (term < prev) & (term > _EPS * total)
            total = np.where(active, total + term, total)
            prev = term
        out[hi] = total / (2.0 * xh)
    return np.sign(x) * out


def _np_scaled_recurrence(diag, off, x):
    """Orthonormal three-term recurrence with the final step left undivided.

    Returns ``(u_n, du_n)`` where ``u_n = P_n(x) / prod(off)`` for the monic
    polynomial ``P_n`` of the Jacobi matrix ``(diag, off)`` and ``du_n`` is
    its derivative in ``x``.
    """
    x = np.asarray(x, dtype=np.complex128)
    n = diag.shape[0]
    u_prev = np.zeros_like(x)
    d_prev = np.zeros_like(x)
    u = np.ones_like(x)
    d = np.zeros_like(x)
    for j in range(n):
        back = off[j - 1] if j > 0 else 0.0
        u_new = (x - diag[j]) * u - back * u_prev
        d_new = u + (x - diag[j]) * d - back * d_prev
        if j < n - 1:
            u_new = u_new / off[j]
            d_new = d_new / off[j]
        u_prev, u = u, u_new
        d_prev, d = d, d_new
    return u, d


def _np_orthonormal_table(diag, off, x, m_max):
    """Rows ``p_0..p_m_max`` of orthonormal polynomials at real points ``x``."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty((m_max + 1, x.shape[0]))
    out[0] = 1.0
    if m_max >= 1:
        out[1] = (x - diag[0]) / off[0]
    for j in range(1, m_max):
        out[j + 1] = ((x - diag[j]) * out[j] - off[j - 1] * out[j - 1]) / off[j]
    return out


# --------------------------------------------------------------------------
# numba
# --------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True, nogil=True)
    def _nb_disjoint_csr(masks):
        n = masks.shape[0]
        deg = np.zeros(n, dtype=np.int64)
        for i in range(n):
            mi = masks[i]
            c = 0
            for j in range(n):
                if mi & masks[j] == 0:
                    c += 1
            deg[i] = c
        indptr = np.zeros(n + 1, dtype=np.int64)
        for i in range(n):
            indptr[i + 1] = indptr[i] + deg[i]
        indices = np.empty(indptr[n], dtype=np.int64)
        for i in range(n):
            mi = masks[i]
            p = indptr[i]
            for j in range(n):
                if mi & masks[j] == 0:
                    indices[p] = j
                    p += 1
        return indptr, indices

    @njit(cache=True, nogil=True)
    def _nb_bfs(indptr, indices, origin):
        n = indptr.shape[0] - 1
        dist = np.full(n, -1, dtype=np.int64)
        queue = np.empty(n, dtype=np.int64)
        dist[origin] = 0
        queue[0] = origin
        head, tail = 0, 1
        while head < tail:
            v = queue[head]
            head += 1
            dv = dist[v] + 1
            for p in range(indptr[v], indptr[v + 1]):
                w = indices[p]
                if dist[w] < 0:
                    dist[w] = dv
                    queue[tail] = w
                    tail += 1
        return dist

    @njit(cache=True, nogil=True)
    def _nb_all_pairs(indptr, indices):
        n = indptr.shape[0] - 1
        out = np.empty((n, n), dtype=np.int64)
        for s in range(n):
            out[s] = _nb_bfs(indptr, indices, s)
        return out

    @njit(cache=True, nogil=True)
    def _nb_jfrac_impl(alpha, omega, z):
        # real arithmetic: avoids hypot and the scaled complex divide per level
        depth = alpha.shape[0]
        floor2 = CF_FLOOR * CF_FLOOR
        out = np.empty(z.shape[0], dtype=np.complex128)
        floored = np.zeros(z.shape[0], dtype=np.bool_)
        for p in range(z.shape[0]):
            zr = z[p].real
            zi = z[p].imag
            gr = zr - alpha[depth - 1]
            gi = zi
            for j in range(depth - 2, -1, -1):
                n2 = gr * gr + gi * gi
                if n2 < floor2:
                    gr = CF_FLOOR
                    gi = 0.0
                    n2 = floor2
                s = omega[j] / n2
                gr = zr - alpha[j] - s * gr
                gi = zi + s * gi
            n2 = gr * gr + gi * gi
            if n2 < floor2:
                gr = CF_FLOOR
                gi = 0.0
                n2 = floor2
                floored[p] = True
            out[p] = complex(gr / n2, -gi / n2)
        return out, floored

    def _nb_jfrac(alpha, omega, z):
        z = np.asarray(z, dtype=np.complex128)
        vals, floored = _nb_jfrac_impl(
            np.ascontiguousarray(alpha, dtype=np.float64),
            np.ascontiguousarray(omega, dtype=np.float64),
            np.ascontiguousarray(z.ravel()),
        )
        return vals.reshape(z.shape), floored.reshape(z.shape)

    @njit(cache=True, nogil=True)
    def _nb_dawson_scalar(x):
        ax = abs(x)
        if ax < DAWSON_SPLIT:
            x2 = ax * ax
            term = ax
            total = ax
            n = 0
            while n < 400:
                n += 1
                term = term * x2 / n * (2 * n - 1) / (2 * n + 1)
                total += term
                if term <= _EPS * total:
                    break
            val = math.exp(-x2) * total
        else:
            inv = 1.0 / (2.0 * ax * ax)
            term = 1.0
            total = 1.0
            prev = math.inf
            n = 0
            while n < 400:
                n += 1
                term = term * (2 * n - 1) * inv
                if term >= prev or term <= _EPS * total:
                    break
                total += term
                prev = term
            val = total / (2.0 * ax)
        return val if x >= 0 else -val

    @njit(cache=True, nogil=True)
    def _nb_dawson_impl(x):
        out = np.empty(x.shape[0])
        for i in range(x.shape[0]):
            out[i] = _nb_dawson_scalar(x[i])
        return out

    def _nb_dawson(x):
        x = np.asarray(x, dtype=np.float64)
        return _nb_dawson_impl(np.ascontiguousarray(x.ravel())).reshape(x.shape)

    @njit(cache=True, nogil=True)
    def _nb_scaled_impl(diag, off, x):
        n = diag.shape[0]
        u_out = np.empty(x.shape[0], dtype=np.complex128)
        d_out = np.empty(x.shape[0], dtype=np.complex128)
        for p in range(x.shape[0]):
            xp = x[p]
            u_prev = 0j
            d_prev = 0j
            u = 1 + 0j
            d = 0j
            for j in range(n):
                back = off[j - 1] if j > 0 else 0.0
                u_new = (xp - diag[j]) * u - back * u_prev
                d_new = u + (xp - diag[j]) * d - back * d_prev
                if j < n - 1:
                    u_new /= off[j]
                    d_new /= off[j]
                u_prev, u = u, u_new
                d_prev, d = d, d_new
            u_out[p] = u
            d_out[p] = d
        return u_out, d_out

    def _nb_scaled_recurrence(diag, off, x):
        x = np.asarray(x, dtype=np.complex128)
        u, d = _nb_scaled_impl(
            np.ascontiguousarray(diag, dtype=np.float64),
            np.ascontiguousarray(off, dtype=np.float64),
            np.ascontiguousarray(x.ravel()),
        )
        return u.reshape(x.shape), d.reshape(x.shape)

    @njit(cache=True, nogil=True)
    def _nb_orthonormal_impl(diag, off, x, m_max):
        out = np.empty((m_max + 1, x.shape[0]))
        for p in range(x.shape[0]):
            out[0, p] = 1.0
            if m_max >= 1:
                out[1, p] = (x[p] - diag[0]) / off[0]
            for j in range(1, m_max):
                out[j + 1, p] = ((x[p] - diag[j]) * out[j, p]
                                 - off[j - 1] * out[j - 1, p]) / off[j]
        return out

    def _nb_orthonormal_table(diag, off, x, m_max):
        return _nb_orthonormal_impl(
            np.ascontiguousarray(diag, dtype=np.float64),
            np.ascontiguousarray(off, dtype=np.float64),
            np.ascontiguousarray(x, dtype=np.float64),
            int(m_max),
        )


numpy_impl = SimpleNamespace(
    disjoint_csr=_np_disjoint_csr,
    bfs=_np_bfs,
    all_pairs=_np_all_pairs,
    jfrac=_np_jfrac,
    dawson=_np_dawson,
    scaled_recurrence=_np_scaled_recurrence,
    orthonormal_table=_np_orthonormal_table,
)

if HAVE_NUMBA:
    numba_impl = SimpleNamespace(
        disjoint_csr=_nb_disjoint_csr,
        bfs=_nb_bfs,
        all_pairs=_nb_all_pairs,
        jfrac=_nb_jfrac,
        dawson=_nb_dawson,
        scaled_recurrence=_nb_scaled_recurrence,
        orthonormal_table=_nb_orthonormal_table,
    )
else:  # pragma: no cover
    numba_impl = None

_active = numba_impl if USE_NUMBA else numpy_impl

disjoint_csr = _active.disjoint_csr
bfs = _active.bfs
all_pairs = _active.all_pairs
jfrac = _active.jfrac
dawson = _active.dawson
scaled_recurrence = _active.scaled_recurrence
orthonormal_table = _active.orthonormal_table


def warmup() -> None:
    """Trigger JIT compilation of every kernel on tiny inputs."""
    masks = np.array([1, 2, 4], dtype=np.int64)
    indptr, indices = disjoint_csr(masks)
    bfs(indptr, indices, 0)
    all_pairs(indptr, indices)
    jfrac(np.zeros(2), np.ones(1), np.array([1j]))
    dawson(np.array([0.5, 7.0]))
    scaled_recurrence(np.zeros(2), np.ones(1), np.array([0.5]))
    orthonormal_table(np.zeros(2), np.ones(1), np.array([0.5]), 1)
