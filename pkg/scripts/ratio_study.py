#!/usr/bin/env python3
"""Sweep the SLC:MLC chip ratio under a sustained hot write load and report SLC saturation.

    python scripts/ratio_study.py --mlc-chips 40 --slc-chips 1 2 4 8
"""

import argparse

from hybridssd.engine import default_modes, run
from hybridssd.flash import TierConfig
from hybridssd.metrics import price
from hybridssd.trace import SyntheticSpec, generate_synthetic


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--mlc-chips", type=int, default=40)
    ap.add_argument("--slc-chips", type=int, nargs="+", default=[1, 2, 4, 8])
    ap.add_argument("--blocks-per-chip", type=int, default=4)
    ap.add_argument("--slc-endurance", type=int, default=50)
    ap.add_argument("-n", type=int, default=30_000)
    ap.add_argument("--pages", type=int, default=256)
    ap.add_argument("--zipf", type=float, default=0.5)
    ap.add_argument("--seed", type=int, default=3)
    args = ap.parse_args()

    trace = generate_synthetic(SyntheticSpec(args.n, 1.0, args.zipf, args.pages, args.seed))
    slc = TierConfig.slc(num_blocks=args.blocks_per_chip, endurance=args.slc_endurance)
    mlc = TierConfig.mlc(num_blocks=args.blocks_per_chip)
    print("ratio    price   hot_frac  slc_max_erase  slc_mean_prog  mlc_mean_prog  saturated")
    for k in args.slc_chips:
        mode = default_modes(slc, mlc, slc_chips=k, mlc_chips=args.mlc_chips)["hybrid"]
        r = run(trace, mode)
        ratio = f"1:{args.mlc_chips / k:g}"
        print(f"{ratio:<8} {price(k, args.mlc_chips):>6}  {r.hot_fraction:8.4f}  "
              f"{r.tiers['slc'].max_erase_cycles:13d}  {r.tiers['slc'].mean_programs_per_block:13.1f}  "
              f"{r.tiers['mlc'].mean_programs_per_block:13.1f}  {r.tiers['slc'].saturated}")


if __name__ == "__main__":
    main()
