#!/usr/bin/env python3
"""Per-kernel modmul census: analytical at a large mu against the reference
counts, and analytical against instrumented at functional sizes.

    python3 scripts/census_table.py --mu 20 --check 4 12
"""

import argparse
import time

from zkspeed.circuit import gen_mock_circuit
from zkspeed.perf.census import ROWS, TABLE1_MU20, analytical_census, compare_census


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--mu", type=int, default=20)
    ap.add_argument("--check", type=int, nargs=2, metavar=("LO", "HI"), default=(4, 10))
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cen = analytical_census(args.mu)
    print(f"analytical census, mu={args.mu} (millions of modmuls)")
    print(f"{'kernel':<22} {'model':>10} {'reference':>10} {'dev':>7}")
    for k in ROWS:
        m = cen.modmuls(k) / 1e6
        ref = TABLE1_MU20.get(k) if args.mu == 20 else None
        dev = f"{m / ref - 1:+.0%}" if ref else ""
        print(f"{k:<22} {m:>10.2f} {ref if ref else '':>10} {dev:>7}")

    lo, hi = args.check
    print(f"\nanalytical vs instrumented, seed {args.seed}")
    for mu in range(lo, hi + 1):
        t0 = time.perf_counter()
        cmp = compare_census(gen_mock_circuit(mu, seed=args.seed))
        k, (_, _, e) = max(cmp.items(), key=lambda kv: abs(kv[1][2]))
        print(f"mu={mu:<3} worst {e:+.3%} ({k})  {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
