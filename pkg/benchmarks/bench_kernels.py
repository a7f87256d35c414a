"""Benchmark the compiled kernels against the pure-numpy fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N]

Times the two hot kernels (batched displacement matrices and one-sided
Jacobi singular values) on representative problem sizes and prints a
table with the speedup of the compiled extension.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from orlicz_qha._kernels import fallback

try:
    from orlicz_qha._kernels import _core as compiled
except ImportError:
    compiled = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    cases = []

    for K, N in ((512, 48), (2048, 64)):
        alphas = rng.normal(size=K) + 1j * rng.normal(size=K)
        cases.append(
            (
                f"displacement_batch K={K} N={N}",
                lambda a=alphas, n=N: fallback.displacement_batch(a, n),
                (lambda a=alphas, n=N: compiled.displacement_batch(a, n))
                if compiled
                else None,
            )
        )
    for n in (48, 96):
        A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        cases.append(
            (
                f"jacobi_singular_values {n}x{n}",
                lambda m=A: fallback.jacobi_singular_values(m),
                (lambda m=A: compiled.jacobi_singular_values(m))
                if compiled
                else None,
            )
        )

    header = f"{'kernel':36s} {'fallback':>10s} {'compiled':>10s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))
    for label, slow, fast in cases:
        t_slow = best_of(slow, args.repeat)
        if fast is None:
            print(f"{label:36s} {t_slow*1e3:9.1f}ms {'n/a':>10s} {'n/a':>8s}")
            continue
        t_fast = best_of(fast, args.repeat)
        print(
            f"{label:36s} {t_slow*1e3:9.1f}ms {t_fast*1e3:9.1f}ms "
            f"{t_slow/t_fast:7.1f}x"
        )


if __name__ == "__main__":
    main()
