"""Compiled vs pure-Python kernels: geodesic integration and LSA residuals.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import statistics
import time

import numpy as np

from affinelie import kernels
from affinelie.algebra import aff_r, aff_rn_algebra, aff_rn_product
from affinelie.atlas import family_product


def timeit(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def cases():
    g2 = np.asarray(family_product("R1").gamma, dtype=float)
    c2 = np.asarray(aff_r().c, dtype=float)
    g6 = np.asarray(aff_rn_product(2).gamma, dtype=float)
    c6 = np.asarray(aff_rn_algebra(2).c, dtype=float)
    g12 = np.asarray(aff_rn_product(3).gamma, dtype=float)
    c12 = np.asarray(aff_rn_algebra(3).c, dtype=float)
    te = np.linspace(0.0, 2.0, 401)
    y0 = np.array([1.0, 0.0, 0.4, 0.7])

    def geo(mod):
        return lambda: mod.integrate_geodesic(kernels.FRAME, g2, y0, te, 1e-10, 1e-10, 0.002, 1e8, 10**6)

    def lsa(mod, g, c):
        return lambda: [mod.lsa_residuals(g, c) for _ in range(200 if g.shape[0] < 10 else 5)]

    return {
        "integrate_geodesic (R1, 400 steps)": geo,
        "lsa_residuals dim 2 (x200)": lambda m: lsa(m, g2, c2),
        "lsa_residuals dim 6 (x200)": lambda m: lsa(m, g6, c6),
        "lsa_residuals dim 12 (x5)": lambda m: lsa(m, g12, c12),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    py = kernels.backend_module("python")
    try:
        cy = kernels.backend_module("cython")
    except ImportError:
        cy = None
        print("compiled kernels not built; timing the Python backend only")
    print(f"{'kernel':40s} {'python [ms]':>12s} {'cython [ms]':>12s} {'speedup':>8s}")
    for name, make in cases().items():
        tp = timeit(make(py), args.repeat) * 1e3
        if cy is None:
            print(f"{name:40s} {tp:12.2f}")
            continue
        tc = timeit(make(cy), args.repeat) * 1e3
        print(f"{name:40s} {tp:12.2f} {tc:12.2f} {tp / tc:8.1f}x")


if __name__ == "__main__":
    main()
