"""Benchmark: compiled projection kernel vs the pure-numpy fallback.

Runs the same projection workloads through both backends and prints a
timing table. Usage:

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from hullcert import _kernels_py

try:
    from hullcert import _kernels
except ImportError:
    _kernels = None

WORKLOADS = [
    # (name, hull points, dimension, queries)
    ("small-2d", 16, 2, 2000),
    ("medium-6d", 64, 6, 500),
    ("wide-784d", 256, 784, 50),
]


def run(kernel, C, queries, gap_tol, max_iter):
    t0 = time.perf_counter()
    total_iters = 0
    for q in queries:
        _, _, _, n_iter, _ = kernel.fw_project(C, q, gap_tol, max_iter)
        total_iters += n_iter
    return time.perf_counter() - t0, total_iters


def main():
    rng = np.random.default_rng(0)
    print(f"{'workload':<12} {'backend':<8} {'time (s)':>10} {'iters':>9} {'us/iter':>9}")
    for name, k, d, n_q in WORKLOADS:
        C = rng.normal(size=(k, d))
        queries = rng.normal(size=(n_q, d)) * 2
        max_iter = 1000 + 20 * k
        for label, kernel in (("cython", _kernels), ("python", _kernels_py)):
            if kernel is None:
                print(f"{name:<12} {label:<8} {'(extension not built)':>10}")
                continue
            elapsed, iters = run(kernel, C, queries, 1e-14, max_iter)
            print(f"{name:<12} {label:<8} {elapsed:>10.3f} {iters:>9} "
                  f"{1e6 * elapsed / max(iters, 1):>9.2f}")


if __name__ == "__main__":
    main()
