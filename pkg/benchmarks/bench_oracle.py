"""Compare the numba and numpy backends of the brute-force enumeration.

Usage: python benchmarks/bench_oracle.py [--min-n 6] [--max-n 12] [--repeat 3]
"""

import argparse
import time

import numpy as np

from symapprox import _jit, _kernels


def _best_of(fn, repeat: int) -> float:
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--min-n", type=int, default=6)
    parser.add_argument("--max-n", type=int, default=12)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    if not _jit.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(args.seed)
    _kernels.enumerate_signs(np.ones(2), "numba")  # compile outside the timings
    print(f"{'n':>3} {'3^n':>8} {'numba [s]':>11} {'numpy [s]':>11} {'speedup':>8}  identical")
    for n in range(args.min_n, args.max_n + 1):
        a = rng.choice([0.0, 0.3, 0.5, 0.7, 1.0, 1.4], size=n)
        t_jit = _best_of(lambda: _kernels.enumerate_signs(a, "numba"), args.repeat)
        t_np = _best_of(lambda: _kernels.enumerate_signs(a, "numpy"), args.repeat)
        v1, i1 = _kernels.enumerate_signs(a, "numba")
        v2, i2 = _kernels.enumerate_signs(a, "numpy")
        same = np.array_equal(v1, v2) and np.array_equal(i1, i2)
        print(f"{n:>3} {3**n:>8} {t_jit:>11.5f} {t_np:>11.5f} {t_np / t_jit:>7.1f}x  {same}")


if __name__ == "__main__":
    main()
