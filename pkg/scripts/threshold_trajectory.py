#!/usr/bin/env python3
"""Print how the watermark policy moves the migration threshold over a run.

Output is two whitespace-separated columns (request index, threshold).
"""

import argparse

from hybridssd.ahdm import Watermark
from hybridssd.engine import default_modes, run
from hybridssd.flash import TierConfig
from hybridssd.trace import SyntheticSpec, generate_synthetic


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("-n", type=int, default=100_000)
    ap.add_argument("--write-ratio", type=float, default=0.8)
    ap.add_argument("--zipf", type=float, default=0.9)
    ap.add_argument("--pages", type=int, default=4096)
    ap.add_argument("--interval", type=int, default=1000)
    ap.add_argument("--watermark", default="0.5,0.8,1,1,16", help="low,high,step,min,max")
    args = ap.parse_args()

    low, high, step, lo_t, hi_t = args.watermark.split(",")
    policy = Watermark(float(low), float(high), int(step), int(lo_t), int(hi_t))
    mode = default_modes(TierConfig.slc(num_blocks=16), TierConfig.mlc(num_blocks=4),
                         threshold=int(lo_t), adapt=policy)["hybrid"]
    trace = generate_synthetic(SyntheticSpec(args.n, args.write_ratio, args.zipf, args.pages, 1))
    rep = run(trace, mode, adapt_interval=args.interval)
    print("# request threshold")
    for i, t in enumerate(rep.threshold_trajectory, start=1):
        print(i * args.interval, t)


if __name__ == "__main__":
    main()
