"""Time the compiled kernels against the NumPy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from udncov import _kernels_py

try:
    from udncov import _kernels as ext
except ImportError:
    ext = None


def cases(rng):
    z = rng.uniform(-20, 40, 200_000) + 1j * rng.uniform(-60, 60, 200_000)
    counts = rng.poisson(500, 2_000)
    n = int(counts.sum())
    avg, inst = rng.random(n), rng.exponential(size=n)
    return {
        "loggamma (2e5 complex)": lambda m: m.loggamma(z),
        "trial_reduce (2e3 trials, 1e6 pts)": lambda m: m.trial_reduce(counts, avg, inst),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'kernel':36s} {'python [ms]':>12s} {'cython [ms]':>12s} {'speedup':>8s}")
    for name, fn in cases(rng).items():
        tp = min(timeit.repeat(lambda: fn(_kernels_py), number=1, repeat=args.repeat)) * 1e3
        if ext is None:
            print(f"{name:36s} {tp:12.2f} {'n/a':>12s} {'n/a':>8s}")
            continue
        tc = min(timeit.repeat(lambda: fn(ext), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:36s} {tp:12.2f} {tc:12.2f} {tp / tc:7.1f}x")


if __name__ == "__main__":
    main()
