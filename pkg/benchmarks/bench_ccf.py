"""Time the numba and numpy CCF kernels on the same inputs.

    python3 benchmarks/bench_ccf.py [--repeat 2000]

Sizes cover the annual grids the tool is built for (n ~ 6..50) and a few
longer weekly-scale series. Numba compile time is excluded by a warm-up call.
"""

import argparse
import sys
import timeit

import numpy as np

from lagscan import _kernels
from lagscan.ccf import cross_correlation

CASES = [(6, 3), (20, 3), (50, 10), (500, 20), (5000, 52)]


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=2000)
    args = p.parse_args(argv)

    rng = np.random.default_rng(0)
    paths = {"numpy": _kernels.ccf_sums_numpy}
    if _kernels.NUMBA_AVAILABLE:
        paths["numba"] = _kernels.ccf_sums_numba
    else:
        print("numba unavailable or disabled; timing numpy only", file=sys.stderr)

    print(f"{'n':>6} {'max_lag':>7} " + " ".join(f"{k + ' us/call':>15}" for k in paths) + f" {'speedup':>8}")
    for n, k in CASES:
        x, y = rng.normal(size=n), rng.normal(size=n)
        ref = _kernels.ccf_sums_numpy(x, y, k)[0]
        times = {}
        for name, fn in paths.items():
            got = fn(x, y, k)[0]  # warm-up, and a cross-check
            assert np.allclose(got, ref, rtol=1e-12, atol=1e-12), name
            reps = max(10, args.repeat if n <= 500 else args.repeat // 10)
            times[name] = timeit.timeit(lambda: fn(x, y, k), number=reps) / reps * 1e6
        speed = f"{times['numpy'] / times['numba']:7.1f}x" if "numba" in times else "      -"
        print(f"{n:>6} {k:>7} " + " ".join(f"{times[name]:>15.2f}" for name in paths) + f" {speed:>8}")

    x, y = rng.normal(size=50), rng.normal(size=50)
    cross_correlation(x, y, 3)
    reps = args.repeat
    t = timeit.timeit(lambda: cross_correlation(x, y, 3), number=reps) / reps * 1e6
    print(f"\ncross_correlation(n=50, max_lag=3) end to end on {_kernels.backend()}: {t:.2f} us/call")


if __name__ == "__main__":
    main()
