"""Compare the compiled Wigner-d kernel with the numpy fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5]

Prints the median time of each backend for a few (two_lmax, nodes) sizes,
the speedup, and the largest entrywise difference between the two tables.
"""
import argparse
import statistics
import time

import numpy as np

from lpqlab.kernels import backend_module, wigner_d_table

SIZES = [(12, 25), (24, 49), (48, 97), (80, 161)]


def median_time(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return statistics.median(times)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    try:
        backend_module("compiled")
    except ImportError:
        print("compiled extension not built; run `pip install -e . --no-build-isolation` first")
        return 1
    print(f"{'two_lmax':>8} {'nodes':>6} {'compiled [ms]':>14} {'python [ms]':>12} {'speedup':>8} {'max diff':>9}")
    for two_lmax, nodes in SIZES:
        beta = np.arccos(np.polynomial.legendre.leggauss(nodes)[0])
        fast = median_time(lambda: wigner_d_table(two_lmax, beta, "compiled"), args.repeat)
        slow = median_time(lambda: wigner_d_table(two_lmax, beta, "python"), args.repeat)
        a = wigner_d_table(two_lmax, beta, "compiled")
        b = wigner_d_table(two_lmax, beta, "python")
        diff = max(float(np.max(np.abs(x - y))) for x, y in zip(a, b))
        print(f"{two_lmax:>8} {nodes:>6} {1e3 * fast:>14.2f} {1e3 * slow:>12.2f} {slow / fast:>8.1f} {diff:>9.1e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
