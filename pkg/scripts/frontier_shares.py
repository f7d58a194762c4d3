#!/usr/bin/env python3
"""Area-share orderings along the DSE frontier: which unit dominates area,
and how the SumCheck share moves with bandwidth under three frontier views
(global frontier grouped by bandwidth, fastest design per bandwidth, and
fastest design within the reference area)."""

import argparse

import numpy as np

from zkspeed.perf import REFERENCE_DESIGN, area_power_rollup, dse
from zkspeed.perf.costs import COMPUTE_ROWS


def share(res, i):
    ro = area_power_rollup(res.design(i))
    top = max(COMPUTE_ROWS, key=lambda k: ro.rows_area[k])
    return ro.rows_area["SumCheck"] / ro.compute_area, top


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--mu", type=int, default=20)
    args = ap.parse_args()
    res = dse(args.mu)
    budget = area_power_rollup(REFERENCE_DESIGN).total_area
    glob = res.frontier()

    print(f"{'GB/s':>6} {'global n':>9} {'share':>6} {'MSM top':>8} {'fastest':>8} {'budget':>7}")
    for bw in sorted(set(int(b) for b in res.bandwidth)):
        g = [i for i in glob if res.bandwidth[i] == bw]
        gs = [share(res, i) for i in g]
        per = res.frontier(bw)
        fast = per[res.runtime_cycles[per].argmin()]
        inb = [i for i in per if res.area_mm2[i] <= budget]
        bud = inb[int(np.argmin(res.runtime_cycles[inb]))] if inb else None
        g_share = f"{np.mean([s for s, _ in gs]):.3f}" if gs else "-"
        top = f"{np.mean([t == 'MSM' for _, t in gs]):.0%}" if gs else "-"
        b_share = f"{share(res, bud)[0]:.3f}" if bud is not None else "-"
        print(f"{bw:>6} {len(g):>9} {g_share:>6} {top:>8} {share(res, fast)[0]:>8.3f} {b_share:>7}")


if __name__ == "__main__":
    main()
