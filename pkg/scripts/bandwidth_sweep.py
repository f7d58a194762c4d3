#!/usr/bin/env python3
"""MSM and SumCheck speedup against PE count and off-chip bandwidth,
normalized to one PE at 512 GB/s.

    python3 scripts/bandwidth_sweep.py --out results/sweep_bandwidth.csv
"""

import argparse
from pathlib import Path

from zkspeed.perf import sweep_bandwidth, write_rows_csv


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--mu", type=int, default=20)
    ap.add_argument("--out", default="results/sweep_bandwidth.csv")
    args = ap.parse_args()
    rows = sweep_bandwidth(args.mu)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_rows_csv(rows, out, "zkspeed-sweep-bandwidth/1")

    for unit in ("msm", "sumcheck"):
        sel = [r for r in rows if r.unit == unit]
        pes = sorted({r.pes for r in sel})
        print(f"\n{unit} speedup   PEs: " + " ".join(f"{p:>6}" for p in pes))
        for bw in sorted({r.bandwidth_gbps for r in sel}):
            vals = {r.pes: r.speedup for r in sel if r.bandwidth_gbps == bw}
            print(f"{bw:>6} GB/s         " + " ".join(f"{vals[p]:>6.2f}" for p in pes))


if __name__ == "__main__":
    main()
