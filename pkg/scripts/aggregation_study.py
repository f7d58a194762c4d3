#!/usr/bin/env python3
"""Grouped vs serial bucket aggregation latency, and how the reorder queue
hides bucket hazards in the accumulate phase."""

import argparse
import random

from zkspeed.msm import aggregation_critical_path
from zkspeed.perf import DEFAULT_COSTS
from zkspeed.perf.msm_sim import aggregation_cycles, random_window_digits, simulate_bucket_phase


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--depth", type=int, default=DEFAULT_COSTS.padd_depth)
    ap.add_argument("--group", type=int, default=16)
    args = ap.parse_args()
    D, g = args.depth, args.group

    print(f"PADD depth {D}, group size {g}")
    print(f"{'W':>3} {'serial':>9} {'grouped':>9} {'cut':>7} {'dag depth':>10}")
    cuts = []
    for W in (7, 8, 9, 10):
        s, q = aggregation_cycles(W, None, D), aggregation_cycles(W, g, D)
        cuts.append(1 - q / s)
        print(f"{W:>3} {s:>9} {q:>9} {1 - q / s:>7.1%} "
              f"{aggregation_critical_path(W, None):>4} -> {aggregation_critical_path(W, g)}")
    print(f"mean cut {sum(cuts) / len(cuts):.1%}")

    print("\naccumulate phase, 16384 digits")
    rng = random.Random(0)
    for W in (7, 10):
        digits = random_window_digits(16384, W, rng)
        n = sum(1 for d in digits if d)
        row = [simulate_bucket_phase(digits, D, q) for q in (1, 4, 16, 64)]
        print(f"W={W:<3} ideal {n + D:>6}  queue 1/4/16/64: " + " ".join(f"{c:>6}" for c in row))


if __name__ == "__main__":
    main()
