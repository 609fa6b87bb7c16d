#!/usr/bin/env python3
"""Run four synthetic workload analogs through hybrid, pure-SLC and pure-MLC devices.

The presets stand in for the IOzone / rsrch / stg / web traces: two
write-heavy mixes with different address reuse and two read-heavy mixes.

    python scripts/workload_study.py --out results/workloads
"""

import argparse
from pathlib import Path

from hybridssd.cli import compare, format_table, write_reports
from hybridssd.engine import PureSLC, default_modes, run
from hybridssd.flash import TierConfig
from hybridssd.trace import SyntheticSpec, generate_synthetic

PRESETS = {
    # name: (write_ratio, zipf_s)
    "iozone-like": (0.8, 0.7),
    "rsrch-like": (0.9, 1.1),
    "stg-like": (0.1, 0.6),
    "web-like": (0.01, 0.6),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("-n", type=int, default=200_000, help="requests per workload")
    ap.add_argument("--pages", type=int, default=4096)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--blocks-per-chip", type=int, default=4)
    ap.add_argument("--out", type=Path, default=None, help="write json + plot-dat here")
    args = ap.parse_args()

    modes = default_modes(
        TierConfig.slc(num_blocks=args.blocks_per_chip),
        TierConfig.mlc(num_blocks=args.blocks_per_chip),
        slc_chips=1, mlc_chips=10, threshold=2,
    )
    # an SLC chip holds half the pages of an MLC chip; match the MLC capacity
    modes["pure-slc"] = PureSLC(TierConfig.slc(num_blocks=2 * args.blocks_per_chip, chips=10))
    for name, (wr, s) in PRESETS.items():
        trace = generate_synthetic(SyntheticSpec(args.n, wr, s, args.pages, args.seed))
        reports = {label: run(trace, mode) for label, mode in modes.items()}
        print(f"== {name}: write_ratio={wr} zipf={s} ==")
        print(format_table(compare(reports)))
        if args.out:
            d = args.out / name
            d.mkdir(parents=True, exist_ok=True)
            for label, rep in reports.items():
                write_reports(d, label, rep, ["json", "plot-dat"])


if __name__ == "__main__":
    main()
