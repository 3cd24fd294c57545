#!/usr/bin/env python3
"""Timing of the exact distance on growing caterpillar trees.

Prints one row per size with the wall time of a full distance-plus-certificate
computation and the ratio to the previous (half) size.  The algorithm is
near-quadratic, so ratios should hover around 4 with log-factor noise.
"""

import argparse
import time

from omtdist.interleaving import monotone_interleaving_distance
from omtdist.randomtrees import caterpillar, shifted


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="100,200,400,800", help="comma-separated leaf counts")
    parser.add_argument("--repeats", type=int, default=3, help="take the best of this many runs")
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    warm = caterpillar(4)
    monotone_interleaving_distance(warm, shifted(warm, 0.25))

    print(f"{'leaves':>8} {'delta':>10} {'seconds':>10} {'ratio':>7}")
    prev = None
    for n in sizes:
        a = caterpillar(n)
        b = shifted(caterpillar(n), 0.3125)
        best = float("inf")
        for _ in range(args.repeats):
            t0 = time.perf_counter()
            delta, _ = monotone_interleaving_distance(a, b)
            best = min(best, time.perf_counter() - t0)
        ratio = "" if prev is None else f"{best / prev:.2f}x"
        print(f"{n:>8} {delta:>10.6f} {best:>10.4f} {ratio:>7}")
        prev = best


if __name__ == "__main__":
    main()
