"""Time the compiled and pure-Python kernels on the same inputs.

    python3 benchmarks/bench_kernels.py [--n 4000] [--repeat 3]
"""
import argparse
import time

import numpy as np

from fracharm import kernels


def best_of(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cell_inputs(n, m, seed):
    # each cell sees m sites scattered in an annulus, as projected neighbours do
    rng = np.random.default_rng(seed)
    r = rng.uniform(0.3, 2.0, n * m)
    th = rng.uniform(0, 2 * np.pi, n * m)
    sites = np.column_stack((r * np.cos(th), r * np.sin(th)))
    offsets = np.arange(0, n * m + 1, m, dtype=np.int64)
    return sites, offsets, np.ones(n)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4000)
    ap.add_argument("--k", type=int, default=500, help="samples drawn by FPS")
    ap.add_argument("--m", type=int, default=40, help="sites per cell")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    if kernels._compiled is None:
        print("compiled kernels are not built; nothing to compare")
        return 1
    rng = np.random.default_rng(0)
    pts = rng.standard_normal((args.n, 3))
    sites, offsets, radii = cell_inputs(args.n, args.m, 1)
    cases = {
        f"farthest_point_sampling n={args.n} k={args.k}":
            lambda b: b.farthest_point_sampling(pts, 0, args.k),
        f"clipped_cell_areas cells={args.n} sites/cell={args.m}":
            lambda b: b.clipped_cell_areas(sites, offsets, radii),
    }
    print(f"{'kernel':48s} {'python s':>10s} {'cython s':>10s} {'speedup':>8s}")
    for name, run in cases.items():
        tp, op = best_of(lambda: run(kernels.get_backend("python")), args.repeat)
        tc, oc = best_of(lambda: run(kernels.get_backend("cython")), args.repeat)
        assert np.allclose(np.asarray(op), np.asarray(oc), rtol=1e-12, atol=1e-12)
        print(f"{name:48s} {tp:10.4f} {tc:10.4f} {tp / tc:7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
