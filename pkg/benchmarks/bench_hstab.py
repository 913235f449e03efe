#!/usr/bin/env python3
"""Benchmark the compiled grid-scan kernel against the numpy fallback.

Usage: python benchmarks/bench_hstab.py [--nx 401] [--nz 501] [--method IMKG343a]
"""
import argparse
import time

import numpy as np

from imexkg import lookup
from imexkg.hevi import kernel_name, scan_grid


def run(method: str, nx: int, nz: int, repeats: int) -> None:
    tableau = lookup(method).tableau
    extras = (100.0, 1000.0, 1e6)
    results = {}
    kernels = ["python"]
    if kernel_name() == "compiled":
        kernels.append("compiled")
    for kernel in kernels:
        best = np.inf
        for _ in range(repeats):
            t0 = time.perf_counter()
            grid = scan_grid(tableau, 3.0, 50.0, nx, nz, extras, kernel=kernel)
            best = min(best, time.perf_counter() - t0)
        results[kernel] = (best, grid)
    points = nx * (nz + len(extras))
    print(f"method {method}, grid {nx}x{nz}+{len(extras)} extras = {points} points")
    for kernel, (seconds, _) in results.items():
        print(f"  {kernel:9s} {seconds:8.3f} s   {points / seconds / 1e6:6.2f} Mpts/s")
    if len(results) == 2:
        gap = np.abs(results["python"][1].rho - results["compiled"][1].rho).max()
        speedup = results["python"][0] / results["compiled"][0]
        print(f"  speedup {speedup:.1f}x, max |drho| = {gap:.2e}")
    else:
        print("  compiled kernel not built; only the fallback was timed")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--nx", type=int, default=401)
    parser.add_argument("--nz", type=int, default=501)
    parser.add_argument("--method", default="IMKG343a")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()
    run(args.method, args.nx, args.nz, args.repeats)


if __name__ == "__main__":
    main()
