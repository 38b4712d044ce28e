#!/usr/bin/env python3
"""Benchmark the compiled fiber root solver against the numpy fallback.

Solves batches of random monic fibers at the degrees the library actually
uses (2..6) and reports wall time per batch plus the agreement between
backends.  Run from the repository root:

    python3 benchmarks/bench_kernels.py [--batch 4000] [--repeats 5]
"""

import argparse
import time

import numpy as np

from rootlift._kernels import (BACKEND, solve_fibers_compiled,
                               solve_fibers_numpy)


def time_solver(solver, coeffs, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = solver(coeffs)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--batch", type=int, default=4000,
                        help="fibers per batch (default 4000)")
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repeats, best-of (default 5)")
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    print(f"selected backend at import: {BACKEND}")
    if solve_fibers_compiled is None:
        print("compiled kernel unavailable; timing the numpy fallback only")
    header = f"{'degree':>6} {'numpy':>12} {'compiled':>12} {'speedup':>8} {'max diff':>10}"
    print(header)
    print("-" * len(header))
    for degree in range(2, 7):
        coeffs = (rng.standard_normal((args.batch, degree))
                  + 1j * rng.standard_normal((args.batch, degree)))
        t_np, out_np = time_solver(solve_fibers_numpy, coeffs, args.repeats)
        if solve_fibers_compiled is None:
            print(f"{degree:>6} {t_np * 1e3:>10.1f}ms {'-':>12} {'-':>8} {'-':>10}")
            continue
        t_cy, out_cy = time_solver(solve_fibers_compiled, coeffs, args.repeats)
        diff = float(np.max(np.abs(out_np - out_cy)))
        print(f"{degree:>6} {t_np * 1e3:>10.1f}ms {t_cy * 1e3:>10.1f}ms "
              f"{t_np / t_cy:>7.1f}x {diff:>10.1e}")


if __name__ == "__main__":
    main()
