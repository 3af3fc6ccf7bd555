"""Compare the compiled kernels against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--n 100000] [--avg-degree 8]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from maxrank import _kernels_py
from maxrank.graph import WebGraph

try:
    from maxrank import _kernels
except ImportError:
    _kernels = None


def random_graph(rng, n, avg_degree):
    m = n * avg_degree
    src = rng.integers(0, n, size=m)
    dst = rng.integers(0, n, size=m)
    return WebGraph.from_edges(n, src, dst)


def bench(fn, repeat=5):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=100_000)
    ap.add_argument("--avg-degree", type=int, default=8)
    args = ap.parse_args()

    rng = np.random.default_rng(1)
    g = random_graph(rng, args.n, args.avg_degree)
    v = rng.normal(size=g.n)
    cbase = rng.uniform(-0.2, 1.0, size=g.n)
    pi = np.full(g.n, 1.0 / g.n)
    out = np.empty(g.n)
    dstar = np.empty(g.n, dtype=np.int64)

    impls = [("numpy fallback", _kernels_py)]
    if _kernels is not None:
        impls.append(("compiled", _kernels))

    print(f"n={g.n} m={g.m}")
    results = {}
    for label, mod in impls:
        t_link = bench(lambda: mod.link_sweep(g.offsets, g.targets, pi, out))
        t_jac = bench(lambda: mod.bellman_sweep_jacobi(
            g.offsets, g.targets, v, cbase, 4.0, 0.85, 0.1, out, dstar))
        vg = v.copy()
        t_gs = bench(lambda: mod.bellman_sweep_gs(
            g.offsets, g.targets, vg, cbase, 4.0, 0.85, 0.1, dstar))
        results[label] = (t_link, t_jac, t_gs)
        print(f"{label:15s} link_sweep {t_link * 1e3:8.2f} ms   "
              f"bellman_jacobi {t_jac * 1e3:8.2f} ms   "
              f"bellman_gs {t_gs * 1e3:8.2f} ms")
    if len(results) == 2:
        fb, comp = results["numpy fallback"], results["compiled"]
        print("speedup (fallback/compiled): "
              f"link {fb[0] / comp[0]:.1f}x  jacobi {fb[1] / comp[1]:.1f}x  "
              f"gs {fb[2] / comp[2]:.1f}x")


if __name__ == "__main__":
    main()
