#!/usr/bin/env python3
"""Benchmark the oracle sweep kernels: numba @njit loops vs the numpy fallback.

Run:  python benchmarks/bench_kernels.py [--repeat 5]
The numba path is also what COARSEACT_NO_NUMBA=1 disables at import time.
"""

import argparse
import time

import numpy as np

from coarseact._kernels import IMPLEMENTATIONS, kernel_backend


def grid(radius, k):
    axes = [np.arange(-radius, radius + 1)] * k
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1).astype(float)


def bench(label, fn, args, repeat):
    fn(*args)  # warm-up (JIT compile on the numba path)
    best = min(
        _timed(fn, args) for _ in range(repeat)
    )
    print(f"  {label:<8} {best * 1e3:9.2f} ms")
    return best


def _timed(fn, args):
    t0 = time.perf_counter()
    fn(*args)
    return time.perf_counter() - t0


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"active backend: {kernel_backend()}")

    m = np.array([[1.0], [-1.0]])
    b_lo = np.array([-4.0, -4.0])
    b_hi = np.array([4.0, 4.0])
    lgrid = grid(24, 1)
    xgrid = grid(24, 2)
    print(f"transporter_sweep: {len(lgrid)} group elements x {len(xgrid)} window points")
    case1 = (lgrid, m, b_lo, b_hi, b_lo - 3, b_hi + 5, xgrid)
    t_nb = bench("numba", IMPLEMENTATIONS["transporter_sweep"]["numba"], case1, args.repeat)
    t_np = bench("numpy", IMPLEMENTATIONS["transporter_sweep"]["numpy"], case1, args.repeat)
    print(f"  speedup numba/numpy: {t_np / t_nb:.1f}x")

    rng = np.random.default_rng(0)
    xs = rng.integers(-20, 21, size=(4000, 2)).astype(float)
    ys = rng.integers(-20, 21, size=(4000, 2)).astype(float)
    print(f"orbit_pair_sweep: {len(xs)} pairs x {len(lgrid)} group elements")
    case2 = (xs, ys, lgrid, m, b_lo, b_hi)
    t_nb = bench("numba", IMPLEMENTATIONS["orbit_pair_sweep"]["numba"], case2, args.repeat)
    t_np = bench("numpy", IMPLEMENTATIONS["orbit_pair_sweep"]["numpy"], case2, args.repeat)
    print(f"  speedup numba/numpy: {t_np / t_nb:.1f}x")

    zs = rng.integers(-20, 21, size=(300, 2)).astype(float)
    ws = rng.integers(-20, 21, size=(300, 2)).astype(float)
    print(f"orbit_compose_sweep: {len(zs)} pairs x {len(lgrid)}^2 element pairs")
    case3 = (zs, ws, lgrid, lgrid, m, b_lo, b_hi, b_lo, b_hi)
    t_nb = bench("numba", IMPLEMENTATIONS["orbit_compose_sweep"]["numba"], case3, args.repeat)
    t_np = bench("numpy", IMPLEMENTATIONS["orbit_compose_sweep"]["numpy"], case3, args.repeat)
    print(f"  speedup numba/numpy: {t_np / t_nb:.1f}x")


if __name__ == "__main__":
    main()
