"""Time the numba and pure-numpy kernel flavours side by side.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each kernel is run once on both backends to compile and to check that the
outputs agree, then timed with ``timeit`` (best of ``--repeat``).
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from oddwalk import _kernels
from oddwalk.graph_core import build_odd_graph
from oddwalk.jacobi import jacobi_limit


def _cases():
    g7, g8, g6 = build_odd_graph(7), build_odd_graph(8), build_odd_graph(6)
    jac = jacobi_limit(400)
    alpha, omega = jac.alpha_array(), jac.omega_array()
    rng = np.random.default_rng(0)
    z = rng.uniform(-20, 20, 10_000) + 1j * rng.uniform(0.1, 5, 10_000)
    x = np.linspace(-40, 40, 1_000_000)
    return [
        ("disjoint_csr k=7", lambda ns: ns.disjoint_csr(g7.vertices)),
        ("disjoint_csr k=8", lambda ns: ns.disjoint_csr(g8.vertices)),
        ("all_pairs k=6", lambda ns: ns.all_pairs(g6.indptr, g6.indices)),
        ("jfrac 1e4 z, depth 400", lambda ns: ns.jfrac(alpha, omega, z)),
        ("dawson 1e6 points", lambda ns: ns.dawson(x)),
    ]


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_same(u, v) for u, v in zip(a, b))
    a, b = np.asarray(a), np.asarray(b)
    if a.dtype.kind in "iub":
        return np.array_equal(a, b)
    return np.allclose(a, b, rtol=1e-12, atol=1e-14)


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    if _kernels.numba_impl is None:
        raise SystemExit("numba is not importable; nothing to compare")

    print(f"{'kernel':<26}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}  agree")
    for name, call in _cases():
        ref = call(_kernels.numpy_impl)
        got = call(_kernels.numba_impl)
        times = []
        for ns in (_kernels.numpy_impl, _kernels.numba_impl):
            best = min(timeit.repeat(lambda: call(ns), number=1, repeat=args.repeat))
            times.append(best * 1e3)
        print(f"{name:<26}{times[0]:>12.2f}{times[1]:>12.2f}{times[0] / times[1]:>9.1f}x  {_same(ref, got)}")


if __name__ == "__main__":
    main()
