"""Benchmark the exhaustive-enumeration kernel: numba @njit vs numpy fallback.

Run:
    python benchmarks/bench_enumeration.py [--max-n 10]

The numba path needs one warmup call for JIT compilation (excluded from the
timings). Histograms from both backends are checked for equality first.
"""

import argparse
import time

import numpy as np

from ddmtest import kernels


def path_edges(n):
    arr = np.arange(n - 1, dtype=np.int64)
    return arr, arr + 1


def star_edges(n):
    return np.zeros(n - 1, dtype=np.int64), np.arange(1, n, dtype=np.int64)


def time_call(func, *args, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        result = func(*args)
        best = min(best, time.perf_counter() - start)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-n", type=int, default=10,
                        help="largest tree size to enumerate (n! permutations)")
    parser.add_argument("--noncrossing", action="store_true",
                        help="also restrict to crossing-free arrangements")
    args = parser.parse_args()

    if not kernels.NUMBA_ENABLED:
        print("numba backend unavailable (DDMTEST_NO_NUMBA set or numba "
              "missing); timing the numpy fallback only")
    else:
        # warmup: trigger JIT compilation outside the timings
        eu, ev = path_edges(4)
        kernels.distance_histogram_numba(eu, ev, 4, args.noncrossing)

    print(f"{'tree':>10} {'n':>3} {'perms':>10} {'numpy (s)':>10} "
          f"{'numba (s)':>10} {'speedup':>8}")
    for n in range(6, args.max_n + 1):
        for name, (eu, ev) in (("path", path_edges(n)), ("star", star_edges(n))):
            t_np, h_np = time_call(kernels.distance_histogram_numpy,
                                   eu, ev, n, args.noncrossing)
            if kernels.NUMBA_ENABLED:
                t_nb, h_nb = time_call(kernels.distance_histogram_numba,
                                       eu, ev, n, args.noncrossing)
                assert np.array_equal(h_np, h_nb), "backend mismatch"
                speedup = f"{t_np / t_nb:7.1f}x"
                nb_col = f"{t_nb:10.4f}"
            else:
                speedup, nb_col = "-", f"{'-':>10}"
            total = int(h_np.sum())
            print(f"{name:>10} {n:>3} {total:>10} {t_np:10.4f} {nb_col} "
                  f"{speedup:>8}")


if __name__ == "__main__":
    main()
