#!/usr/bin/env python3
"""Full design-space sweep at one mu: CSV plus a per-bandwidth frontier digest.

    python3 scripts/run_dse.py --mu 20 --out results/dse_mu20.csv
"""

import argparse
import time
from pathlib import Path

from zkspeed.perf import DEFAULT_COSTS, KNOB_DOMAINS, dse, load_config, write_dse_csv


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--mu", type=int, default=20)
    ap.add_argument("--config")
    ap.add_argument("--out", default="results/dse.csv")
    ap.add_argument("--pareto-only", action="store_true")
    args = ap.parse_args()

    costs, domains = load_config(args.config) if args.config else (DEFAULT_COSTS, KNOB_DOMAINS)
    t0 = time.perf_counter()
    res = dse(args.mu, domains, costs)
    dt = time.perf_counter() - t0
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    n = write_dse_csv(res, out, args.pareto_only)
    print(f"{len(res)} designs in {dt:.1f}s, {n} rows -> {out}")

    print(f"{'GB/s':>6} {'front':>6} {'best ms':>9} {'area':>8}  design")
    for bw in domains["bandwidth_gbps"]:
        idx = res.frontier(bw)
        best = idx[res.runtime_ms[idx].argmin()]
        print(f"{bw:>6} {len(idx):>6} {res.runtime_ms[best]:>9.3f} {res.area_mm2[best]:>8.1f}  "
              f"{tuple(int(x) for x in res.knobs[best])}")


if __name__ == "__main__":
    main()
