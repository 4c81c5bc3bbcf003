"""Timing comparison of the numba and numpy backends.

Two hot paths are measured: batched Hermitian eigensolves (the Monte Carlo
bottleneck) and piecewise polynomial evaluation (the distribution-curve
bottleneck).  The numba kernels are warmed up before timing so JIT compilation
is excluded.

Run as: python3 benchmarks/bench_backends.py [--samples 20000]
"""

import argparse
import math
import time

import numpy as np

from sledist import available_backends, coefficient_table, get_backend, sle_distribution
from sledist.montecarlo import SimulationConfig, sample_sle


def best_of(fn, repeats=5):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_eigvalsh(backends, batch=4096):
    print(f"\nbatched eigvalsh, {batch} Hermitian matrices per call (best of 5, ms)")
    print(f"{'K':>4} {'N':>5}" + "".join(f" {name:>12}" for name in backends))
    rng = np.random.default_rng(0)
    for K, N in [(2, 10), (4, 10), (6, 6), (8, 16)]:
        Z = (rng.standard_normal((batch, K, N)) + 1j * rng.standard_normal((batch, K, N))) * math.sqrt(0.5)
        R = Z @ Z.conj().swapaxes(-1, -2)
        row = f"{K:>4} {N:>5}"
        for name in backends:
            be = get_backend(name)
            be.eigvalsh_batch(R[:8])  # warm up (JIT compile on first numba call)
            row += f" {best_of(lambda: be.eigvalsh_batch(R)) * 1e3:>12.2f}"
        print(row)


def bench_curve_eval(backends, points=200_000):
    print(f"\npiecewise pdf/cdf evaluation, {points} points (best of 5, ms)")
    print(f"{'K':>4} {'N':>5} {'curve':>6}" + "".join(f" {name:>12}" for name in backends))
    for K, N in [(2, 10), (4, 10), (4, 100)]:
        dist = sle_distribution(coefficient_table(K, N))
        xs = np.linspace(1.0, float(K), points)
        for label, pp in [("pdf", dist.pdf), ("cdf", dist.cdf)]:
            row = f"{K:>4} {N:>5} {label:>6}"
            for name in backends:
                be = get_backend(name)
                pp.eval_many(xs[:64], backend=be)  # warm up
                row += f" {best_of(lambda: pp.eval_many(xs, backend=be)) * 1e3:>12.2f}"
            print(row)


def bench_sampling(backends, samples):
    print(f"\nend-to-end sampling of {samples} statistics (single run, s)")
    print(f"{'K':>4} {'N':>5}" + "".join(f" {name:>12}" for name in backends))
    for K, N in [(2, 10), (4, 10), (6, 6)]:
        row = f"{K:>4} {N:>5}"
        for name in backends:
            be = get_backend(name)
            cfg = SimulationConfig(K=K, N=N, samples=256, seed=0)
            sample_sle(cfg, backend=be)  # warm up
            cfg = SimulationConfig(K=K, N=N, samples=samples, seed=0)
            t0 = time.perf_counter()
            sample_sle(cfg, backend=be)
            row += f" {time.perf_counter() - t0:>12.3f}"
        print(row)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=20_000)
    args = parser.parse_args()

    backends = available_backends()
    print(f"available backends: {', '.join(backends)}")
    if len(backends) == 1:
        print("numba not installed; timing the numpy backend only")

    bench_eigvalsh(backends)
    bench_curve_eval(backends)
    bench_sampling(backends, args.samples)


if __name__ == "__main__":
    main()
