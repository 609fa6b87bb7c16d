"""Command-line front end.

Exit codes: 0 on success, 2 on usage errors (nothing is written), 1 when
the simulation itself fails (unparseable trace, a tier running out of
space).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, field, replace
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from .ahdm import Watermark
from .engine import MODE_NAMES, Hybrid, PureMLC, PureSLC, run
from .flash import FlashError, TierConfig
from .metrics import (
    REPORT_FORMATS,
    PriceModel,
    SimReport,
    access_time_gain,
    emit_report,
    lifespan_gain,
    plot_dat,
    plot_series,
)
from .trace import SyntheticSpec, TraceError, generate_synthetic, parse_csv, parse_msr

log = logging.getLogger("hybridssd")

SYNTHETIC_KEYS = {
    "n": ("num_requests", int),
    "write_ratio": ("write_ratio", float),
    "zipf": ("zipf_s", float),
    "pages": ("address_space_pages", int),
    "seed": ("seed", int),
}
SYNTHETIC_DEFAULTS = dict(num_requests=100_000, write_ratio=0.5, zipf_s=1.0,
                          address_space_pages=4096, seed=0)


class UsageError(ValueError):
    def __init__(self, flag: str, message: str):
        self.flag = flag
        super().__init__(f"{flag}: {message}")


@dataclass
class CliConfig:
    trace_path: Optional[str]
    trace_format: Optional[str]
    synthetic: Optional[SyntheticSpec]
    modes: List[str]
    slc: TierConfig
    mlc: TierConfig
    slc_chips: int
    mlc_chips: int
    threshold: int
    warm_capacity: Optional[int]
    hot_capacity: Optional[int]
    adapt: Optional[Watermark]
    adapt_interval: int
    ratio_sweep: Optional[List[int]]
    price: PriceModel
    out: Path
    formats: List[str] = field(default_factory=lambda: ["json"])

    def hybrid(self, slc_chips: Optional[int] = None) -> Hybrid:
        return Hybrid.build(
            replace(self.slc, chips=slc_chips if slc_chips is not None else self.slc_chips),
            replace(self.mlc, chips=self.mlc_chips),
            threshold=self.threshold,
            hot_capacity=self.hot_capacity,
            warm_capacity=self.warm_capacity,
            adapt=self.adapt,
        )

    def runs(self) -> Dict[str, object]:
        """label -> device mode, in output order."""
        out: Dict[str, object] = {}
        for name in self.modes:
            if name == "hybrid":
                if self.ratio_sweep:
                    for k in self.ratio_sweep:
                        out[f"hybrid-slc{k}"] = self.hybrid(k)
                else:
                    out["hybrid"] = self.hybrid()
            elif name == "pure-slc":
                out[name] = PureSLC(replace(self.slc, chips=self.mlc_chips))
            else:
                out[name] = PureMLC(replace(self.mlc, chips=self.mlc_chips))
        return out

    def to_dict(self) -> dict:
        d = {
            "trace": self.trace_path,
            "format": self.trace_format,
            "synthetic": asdict(self.synthetic) if self.synthetic else None,
            "adapt_interval": self.adapt_interval,
            "price": {k: str(v) for k, v in asdict(self.price).items()},
            "out": str(self.out),
            "formats": self.formats,
            "runs": {},
        }
        for label, mode in self.runs().items():
            entry = {"mode": mode.name}
            for cfg in mode.tier_configs():
                tier = asdict(cfg)
                tier["kind"] = cfg.kind.value
                entry[cfg.name] = tier
            if isinstance(mode, Hybrid):
                ahdm = asdict(mode.ahdm)
                entry["ahdm"] = ahdm
            d["runs"][label] = entry
        return d


def parse_synthetic(text: str, seed: Optional[int]) -> SyntheticSpec:
    params = dict(SYNTHETIC_DEFAULTS)
    for item in filter(None, (s.strip() for s in text.split(","))):
        key, sep, value = item.partition("=")
        if not sep or key not in SYNTHETIC_KEYS:
            raise UsageError("--synthetic", f"unknown item {item!r}; keys: {', '.join(SYNTHETIC_KEYS)}")
        name, conv = SYNTHETIC_KEYS[key]
        try:
            params[name] = conv(value)
        except ValueError:
            raise UsageError("--synthetic", f"bad value for {key}: {value!r}") from None
    if seed is not None:
        params["seed"] = seed
    try:
        return SyntheticSpec(**params)
    except ValueError as exc:
        raise UsageError("--synthetic", str(exc)) from None


def parse_adapt(text: str) -> Optional[Watermark]:
    if text == "off":
        return None
    kind, _, rest = text.partition(":")
    parts = rest.split(",")
    if kind != "watermark" or len(parts) != 5:
        raise UsageError("--adapt", "expected off or watermark:low,high,step,min,max")
    try:
        low, high = float(parts[0]), float(parts[1])
        step, min_t, max_t = (int(p) for p in parts[2:])
        return Watermark(low, high, step, min_t, max_t)
    except ValueError as exc:
        raise UsageError("--adapt", str(exc)) from None


def parse_sweep(text: str) -> List[int]:
    key, sep, rng = text.partition("=")
    lo, dots, hi = rng.partition("..")
    try:
        if key != "slc_chips" or not sep or not dots:
            raise ValueError
        lo_i, hi_i = int(lo), int(hi)
    except ValueError:
        raise UsageError("--ratio-sweep", "expected slc_chips=A..B") from None
    if not 1 <= lo_i <= hi_i:
        raise UsageError("--ratio-sweep", "need 1 <= A <= B")
    return list(range(lo_i, hi_i + 1))


def _list(text: str, allowed: Sequence[str], flag: str) -> List[str]:
    items = [s.strip() for s in text.split(",") if s.strip()]
    bad = [s for s in items if s not in allowed]
    if bad or not items:
        raise UsageError(flag, f"expected a comma list drawn from {', '.join(allowed)}")
    return list(dict.fromkeys(items))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hybridssd",
        description="Trace-driven simulation of an SLC/MLC hybrid SSD with hot-data migration.",
    )
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--trace", metavar="PATH", help="block I/O trace file")
    src.add_argument("--synthetic", metavar="SPEC",
                     help="n=..,write_ratio=..,zipf=..,pages=..,seed=..")
    p.add_argument("--format", choices=["msr", "csv"], help="trace format (default: guess)")
    p.add_argument("--mode", default="hybrid,pure-slc,pure-mlc", help="comma list of device modes")
    p.add_argument("--threshold", type=int, default=2, help="migration threshold (referrals)")
    p.add_argument("--warm-cap", type=int, help="warm list capacity (default 4x hot)")
    p.add_argument("--hot-cap", type=int, help="hot list capacity (default: usable SLC pages)")
    p.add_argument("--slc-blocks", type=int, default=64, help="blocks per SLC chip")
    p.add_argument("--mlc-blocks", type=int, default=64, help="blocks per MLC chip")
    p.add_argument("--slc-chips", type=int, default=1, help="SLC chips in the hybrid")
    p.add_argument("--mlc-chips", type=int, default=10,
                   help="MLC chips in the hybrid; chips of either pure device")
    p.add_argument("--slc-endurance", type=int, default=100_000)
    p.add_argument("--mlc-endurance", type=int, default=10_000)
    p.add_argument("--gc-threshold", type=int, default=1, help="free blocks kept in reserve")
    p.add_argument("--slc-price", default="3.00", help="USD per SLC chip")
    p.add_argument("--mlc-price", default="0.90", help="USD per MLC chip")
    p.add_argument("--adapt", default="off", help="off | watermark:low,high,step,min,max")
    p.add_argument("--adapt-interval", type=int, default=1000)
    p.add_argument("--ratio-sweep", metavar="RANGE", help="slc_chips=A..B, one hybrid run each")
    p.add_argument("--report", default="json", help="comma list of json, csv, plot-dat")
    p.add_argument("--out", default="results", help="output directory")
    p.add_argument("--seed", type=int, help="override the synthetic seed")
    p.add_argument("--dump-config", action="store_true", help="print resolved config and exit")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args: argparse.Namespace) -> CliConfig:
    for flag in ("threshold", "slc_blocks", "mlc_blocks", "slc_chips", "mlc_chips",
                 "adapt_interval", "slc_endurance", "mlc_endurance", "gc_threshold"):
        if getattr(args, flag) < 1:
            raise UsageError("--" + flag.replace("_", "-"), "must be a positive integer")
    for flag in ("warm_cap", "hot_cap"):
        if getattr(args, flag) is not None and getattr(args, flag) < 1:
            raise UsageError("--" + flag.replace("_", "-"), "must be a positive integer")
    if args.format and not args.trace:
        raise UsageError("--format", "only meaningful with --trace")
    if args.seed is not None and not args.synthetic:
        raise UsageError("--seed", "only meaningful with --synthetic")

    modes = _list(args.mode, MODE_NAMES, "--mode")
    formats = _list(args.report, REPORT_FORMATS, "--report")
    sweep = parse_sweep(args.ratio_sweep) if args.ratio_sweep else None
    if sweep and "hybrid" not in modes:
        raise UsageError("--ratio-sweep", "requires hybrid among --mode")
    try:
        prices = PriceModel(Decimal(args.slc_price), Decimal(args.mlc_price))
    except (InvalidOperation, ValueError):
        raise UsageError("--slc-price/--mlc-price", "prices must be positive numbers") from None

    try:
        slc = TierConfig.slc(num_blocks=args.slc_blocks, endurance=args.slc_endurance,
                             gc_free_block_threshold=args.gc_threshold)
        mlc = TierConfig.mlc(num_blocks=args.mlc_blocks, endurance=args.mlc_endurance,
                             gc_free_block_threshold=args.gc_threshold)
    except ValueError as exc:
        raise UsageError("--slc-blocks/--mlc-blocks/--gc-threshold", str(exc)) from None

    cfg = CliConfig(
        trace_path=args.trace,
        trace_format=args.format,
        synthetic=parse_synthetic(args.synthetic, args.seed) if args.synthetic else None,
        modes=modes,
        slc=slc,
        mlc=mlc,
        slc_chips=args.slc_chips,
        mlc_chips=args.mlc_chips,
        threshold=args.threshold,
        warm_capacity=args.warm_cap,
        hot_capacity=args.hot_cap,
        adapt=parse_adapt(args.adapt),
        adapt_interval=args.adapt_interval,
        ratio_sweep=sweep,
        price=prices,
        out=Path(args.out),
        formats=formats,
    )
    try:
        cfg.runs()
    except ValueError as exc:
        raise UsageError("--hot-cap", str(exc)) from None
    return cfg


def load_trace(cfg: CliConfig):
    if cfg.synthetic is not None:
        return generate_synthetic(cfg.synthetic)
    text = Path(cfg.trace_path).read_text()
    fmt = cfg.trace_format
    if fmt is None:
        first = next((ln for ln in text.splitlines() if ln.strip()), "")
        fmt = "msr" if first.count(",") == 6 else "csv"
    return parse_msr(text) if fmt == "msr" else parse_csv(text)


def compare(reports: Dict[str, SimReport]) -> List[dict]:
    """Side-by-side rows; gains are relative to the pure-MLC run when present."""
    if len(reports) < 2:
        raise ValueError("compare needs at least two reports")
    labels = list(reports)
    base_label = next((k for k in labels if reports[k].mode == "pure-mlc"), labels[1])
    base = reports[base_label]
    rows = []
    for label, r in reports.items():
        rows.append({
            "run": label,
            "price_usd": r.price_usd,
            "mean_access_time_us": r.mean_access_time_us,
            "mean_programs_per_block": r.mean_programs_per_block(),
            "hot_fraction": r.hot_fraction,
            "saturated": r.saturated,
            "lifespan_gain_pct": _gain(lifespan_gain, base.mean_programs_per_block(), r.mean_programs_per_block()),
            "access_time_gain_pct": _gain(access_time_gain, base.mean_access_time_us, r.mean_access_time_us),
            "baseline": base_label,
        })
    return rows


def _gain(fn, baseline, value):
    return fn(baseline, value) if baseline > 0 else 0.0


def format_table(rows: List[dict]) -> str:
    cols = ["run", "price_usd", "mean_access_time_us", "mean_programs_per_block",
            "hot_fraction", "saturated", "lifespan_gain_pct", "access_time_gain_pct"]
    cells = [[_cell(row[c], 4 if c == "hot_fraction" else 2) for c in cols] for row in rows]
    widths = [max(len(c), *(len(r[i]) for r in cells)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip()]
    lines += ["  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip() for r in cells]
    lines.append(f"(gains relative to {rows[0]['baseline']})")
    return "\n".join(lines) + "\n"


def _cell(v, digits: int) -> str:
    if isinstance(v, float):
        return f"{v:.{digits}f}"
    return str(v)


def write_reports(out: Path, label: str, report: SimReport, formats: List[str]) -> List[Path]:
    written = []
    for fmt in formats:
        if fmt == "plot-dat":
            for name, rows in plot_series(report).items():
                path = out / f"{label}.{name}.dat"
                path.write_bytes(plot_dat(rows, f"{label} {name}"))
                written.append(path)
        else:
            path = out / f"{label}.{fmt}"
            path.write_bytes(emit_report(report, fmt))
            written.append(path)
    return written


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
    except UsageError as exc:
        parser.error(str(exc))

    if args.dump_config:
        json.dump(cfg.to_dict(), sys.stdout, indent=2)
        sys.stdout.write("\n")
        return 0

    try:
        cfg.out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        parser.error(f"--out: cannot create {cfg.out}: {exc}")
    if not os.access(cfg.out, os.W_OK):
        parser.error(f"--out: {cfg.out} is not writable")

    try:
        trace = load_trace(cfg)
        reports = {}
        for label, mode in cfg.runs().items():
            log.info("running %s on %d requests", label, len(trace))
            reports[label] = run(trace, mode, cfg.adapt_interval, cfg.price)
    except (TraceError, FlashError, OSError) as exc:
        print(f"hybridssd: error: {exc}", file=sys.stderr)
        return 1

    for label, report in reports.items():
        for path in write_reports(cfg.out, label, report, cfg.formats):
            log.info("wrote %s", path)
    if len(reports) >= 2:
        table = format_table(compare(reports))
        (cfg.out / "comparison.txt").write_text(table)
        sys.stdout.write(table)
    return 0


if __name__ == "__main__":
    sys.exit(main())
