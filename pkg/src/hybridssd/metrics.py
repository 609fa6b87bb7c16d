"""Report structures, the chip price model, gain arithmetic and report emitters."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field, fields
from decimal import Decimal
from typing import Dict, List

REPORT_FORMATS = ("json", "csv", "plot-dat")


@dataclass
class TierReport:
    kind: str
    blocks: int = 0
    pages_per_block: int = 0
    chips: int = 0
    mean_programs_per_block: float = 0.0
    max_erase_cycles: int = 0
    saturated: bool = False
    live_fraction: float = 0.0
    reads: int = 0
    programs: int = 0
    erases: int = 0
    host_programs: int = 0
    migration_programs: int = 0
    gc_relocations: int = 0
    gc_latency_us: int = 0


@dataclass
class SimReport:
    mode: str
    total_requests: int = 0
    read_requests: int = 0
    write_requests: int = 0
    total_page_ops: int = 0
    read_page_ops: int = 0
    write_page_ops: int = 0
    cold_inserts: int = 0
    warm_refreshes: int = 0
    promotions: int = 0
    hot_hits: int = 0
    demotions: int = 0
    hot_fraction: float = 0.0
    slc_write_ops: int = 0
    mlc_write_ops: int = 0
    migration_count: int = 0
    migration_latency_us: int = 0
    gc_latency_us: int = 0
    total_latency_us: int = 0
    mean_access_time_us: float = 0.0
    slc_chips: int = 0
    mlc_chips: int = 0
    price_usd: float = 0.0
    saturated: bool = False
    threshold_trajectory: List[int] = field(default_factory=list)
    tiers: Dict[str, TierReport] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "SimReport":
        data = dict(data)
        data["tiers"] = {k: TierReport(**v) for k, v in data.get("tiers", {}).items()}
        return cls(**data)

    def mean_programs_per_block(self, tier: str = "mlc") -> float:
        """Mean programs per block of ``tier``, or over the whole device if absent."""
        if tier in self.tiers:
            return self.tiers[tier].mean_programs_per_block
        blocks = sum(t.blocks for t in self.tiers.values())
        if not blocks:
            return 0.0
        return sum(t.programs for t in self.tiers.values()) / blocks


@dataclass(frozen=True)
class PriceModel:
    slc_chip_usd: Decimal = Decimal("3.00")
    mlc_chip_usd: Decimal = Decimal("0.90")

    def __post_init__(self):
        if self.slc_chip_usd <= 0 or self.mlc_chip_usd <= 0:
            raise ValueError("chip prices must be positive")


def price(num_slc_chips: int, num_mlc_chips: int, model: PriceModel = PriceModel()) -> Decimal:
    if num_slc_chips < 0 or num_mlc_chips < 0:
        raise ValueError("chip counts must be non-negative")
    return num_slc_chips * Decimal(model.slc_chip_usd) + num_mlc_chips * Decimal(model.mlc_chip_usd)


def price_premium(baseline_usd, hybrid_usd) -> Decimal:
    """Extra cost of the hybrid as a percentage of the hybrid's own price.

    With the default chips, 1 SLC + 10 MLC ($12) over 10 MLC ($9) gives 25%.
    """
    baseline_usd, hybrid_usd = Decimal(baseline_usd), Decimal(hybrid_usd)
    if hybrid_usd <= 0:
        raise ValueError("hybrid price must be positive")
    return 100 * (hybrid_usd - baseline_usd) / hybrid_usd


def _reduction(baseline: float, value: float) -> float:
    if baseline <= 0:
        raise ValueError("baseline must be positive")
    return 100.0 * (baseline - value) / baseline


def lifespan_gain(baseline_mean_programs: float, hybrid_mean_programs: float) -> float:
    """Percent reduction in programs per block, read as a lifespan increase."""
    return _reduction(baseline_mean_programs, hybrid_mean_programs)


def access_time_gain(baseline_mean_us: float, hybrid_mean_us: float) -> float:
    return _reduction(baseline_mean_us, hybrid_mean_us)


# -- emitters -----------------------------------------------------------------


def report_dict(report: SimReport) -> dict:
    return asdict(report)


def flatten(report: SimReport) -> List[tuple]:
    """(field, value) rows in frozen order; tiers become ``tiers.<name>.<field>``."""
    rows = []
    for f in fields(SimReport):
        value = getattr(report, f.name)
        if f.name == "tiers":
            for name in sorted(value):
                for tf in fields(TierReport):
                    rows.append((f"tiers.{name}.{tf.name}", getattr(value[name], tf.name)))
        elif f.name == "threshold_trajectory":
            rows.append((f.name, ";".join(str(v) for v in value)))
        else:
            rows.append((f.name, value))
    return rows


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def plot_series(report: SimReport) -> Dict[str, List[tuple]]:
    """One (label, value) series per chart: request split, wear, latency, threshold."""
    slc = report.tiers.get("slc", TierReport("slc"))
    mlc = report.tiers.get("mlc", TierReport("mlc"))
    per_req = report.total_requests or 1
    return {
        "hot_fraction": [
            ("slc_writes", report.slc_write_ops),
            ("mlc_writes", report.mlc_write_ops),
            ("reads", report.read_page_ops),
            ("hot_fraction", report.hot_fraction),
        ],
        "writes_per_block": [
            ("slc", slc.mean_programs_per_block),
            ("mlc", mlc.mean_programs_per_block),
        ],
        "access_time": [
            ("mean_access_time_us", report.mean_access_time_us),
            ("migration_us_per_request", report.migration_latency_us / per_req),
            ("gc_us_per_request", report.gc_latency_us / per_req),
        ],
        "threshold": [(str(i), t) for i, t in enumerate(report.threshold_trajectory)],
    }


def plot_dat(rows: List[tuple], title: str) -> bytes:
    out = io.StringIO()
    out.write(f"# {title}\n# label value\n")
    for label, value in rows:
        out.write(f"{label} {_fmt(value)}\n")
    return out.getvalue().encode()


def emit_report(report: SimReport, fmt: str) -> bytes:
    """Serialize ``report``.

    ``plot-dat`` concatenates the per-chart blocks separated by two blank
    lines, so gnuplot can address each with ``index``; the CLI also writes
    them as separate files.
    """
    if fmt == "json":
        return (json.dumps(report_dict(report), indent=2) + "\n").encode()
    if fmt == "csv":
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["field", "value"])
        for name, value in flatten(report):
            w.writerow([name, _fmt(value)])
        return out.getvalue().encode()
    if fmt == "plot-dat":
        blocks = [plot_dat(rows, name) for name, rows in plot_series(report).items()]
        return b"\n\n".join(blocks)
    raise ValueError(f"unknown report format {fmt!r}; expected one of {REPORT_FORMATS}")
