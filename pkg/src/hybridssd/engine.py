"""Trace-driven simulation of hybrid, pure-SLC and pure-MLC devices."""

from __future__ import annotations

import logging
import sys
from dataclasses import dataclass, replace
from typing import Iterable, List, Optional, Tuple, Union

from .ahdm import AhdmClassifier, AhdmConfig, Decision
from .flash import FlashDevice, TierConfig, TierKind, Unmapped
from .metrics import PriceModel, SimReport, TierReport, emit_report, price
from .trace import TraceRecord

log = logging.getLogger(__name__)

UNATTAINABLE_THRESHOLD = sys.maxsize


@dataclass(frozen=True)
class Hybrid:
    slc: TierConfig
    mlc: TierConfig
    ahdm: AhdmConfig

    name = "hybrid"

    def __post_init__(self):
        if self.slc.kind is not TierKind.SLC or self.mlc.kind is not TierKind.MLC:
            raise ValueError("hybrid needs an SLC tier and an MLC tier")
        if self.slc.page_size_bytes != self.mlc.page_size_bytes:
            raise ValueError("tiers must share a page size")
        if self.ahdm.hot_capacity > self.slc.usable_pages:
            raise ValueError(
                f"hot_capacity {self.ahdm.hot_capacity} exceeds usable SLC pages "
                f"{self.slc.usable_pages}"
            )

    @classmethod
    def build(
        cls,
        slc: TierConfig,
        mlc: TierConfig,
        threshold: int = 2,
        hot_capacity: Optional[int] = None,
        warm_capacity: Optional[int] = None,
        adapt=None,
    ) -> "Hybrid":
        """Size H to the usable SLC pages and W to four times H unless given."""
        hot = hot_capacity if hot_capacity is not None else slc.usable_pages
        warm = warm_capacity if warm_capacity is not None else 4 * hot
        cfg = AhdmConfig(warm_capacity=warm, hot_capacity=hot, threshold=threshold, adapt=adapt)
        return cls(slc, mlc, cfg)

    def tier_configs(self) -> Tuple[TierConfig, ...]:
        return (self.slc, self.mlc)

    @property
    def page_size(self) -> int:
        return self.slc.page_size_bytes


@dataclass(frozen=True)
class PureSLC:
    slc: TierConfig
    name = "pure-slc"

    def tier_configs(self) -> Tuple[TierConfig, ...]:
        return (self.slc,)

    @property
    def page_size(self) -> int:
        return self.slc.page_size_bytes


@dataclass(frozen=True)
class PureMLC:
    mlc: TierConfig
    name = "pure-mlc"

    def tier_configs(self) -> Tuple[TierConfig, ...]:
        return (self.mlc,)

    @property
    def page_size(self) -> int:
        return self.mlc.page_size_bytes


DeviceMode = Union[Hybrid, PureSLC, PureMLC]
MODE_NAMES = ("hybrid", "pure-slc", "pure-mlc")


def default_modes(
    slc: Optional[TierConfig] = None,
    mlc: Optional[TierConfig] = None,
    slc_chips: int = 1,
    mlc_chips: int = 10,
    **hybrid_kw,
) -> dict:
    """The three devices compared against each other.

    The hybrid carries ``slc_chips`` SLC chips next to ``mlc_chips`` MLC
    chips; the pure devices use ``mlc_chips`` chips of their own type.
    """
    slc = slc or TierConfig.slc()
    mlc = mlc or TierConfig.mlc()
    return {
        "hybrid": Hybrid.build(replace(slc, chips=slc_chips), replace(mlc, chips=mlc_chips), **hybrid_kw),
        "pure-slc": PureSLC(replace(slc, chips=mlc_chips)),
        "pure-mlc": PureMLC(replace(mlc, chips=mlc_chips)),
    }


@dataclass(frozen=True)
class RequestOutcome:
    latency_us: int
    pages_touched: int
    decisions: Tuple[Decision, ...] = ()
    migrations: int = 0


class Simulator:
    """Serial replay of one trace against one device.

    With ``check=True`` the flash invariants and hot-residency are asserted
    after every request (slow; meant for tests).
    """

    def __init__(
        self,
        mode: DeviceMode,
        adapt_interval: int = 1000,
        price_model: PriceModel = PriceModel(),
        check: bool = False,
    ):
        if adapt_interval < 1:
            raise ValueError("adapt_interval must be positive")
        self.mode = mode
        self.adapt_interval = adapt_interval
        self.price_model = price_model
        self.check = check
        self.device = FlashDevice(*mode.tier_configs())
        self.classifier = AhdmClassifier(mode.ahdm) if isinstance(mode, Hybrid) else None
        self._single_tier = None if self.classifier else mode.tier_configs()[0].name
        self._cold_tier = "mlc" if self.classifier else self._single_tier
        self.report_ = SimReport(mode=mode.name)
        self.decision_log: List[Decision] = []

    def process(self, record: TraceRecord) -> RequestOutcome:
        r = self.report_
        dev = self.device
        latency = 0
        migrations = 0
        decisions = []
        pages = record.pages(self.mode.page_size)
        r.total_requests += 1
        if record.is_write:
            r.write_requests += 1
        else:
            r.read_requests += 1

        for lpn in pages:
            r.total_page_ops += 1
            if not record.is_write:
                r.read_page_ops += 1
                try:
                    latency += dev.read_page(lpn)
                except Unmapped:
                    latency += dev.read_unmapped(self._cold_tier)
                continue

            r.write_page_ops += 1
            if self.classifier is None:
                latency += dev.write_page(lpn, self._single_tier)
                if self._single_tier == "slc":
                    r.slc_write_ops += 1
                else:
                    r.mlc_write_ops += 1
                continue

            d = self.classifier.on_write(lpn)
            decisions.append(d.kind)
            self.decision_log.append(d.kind)
            if d.kind is Decision.HOT_HIT:
                r.hot_hits += 1
                r.slc_write_ops += 1
                latency += dev.write_page(lpn, "slc")
                continue
            # cold, warm and promoting writes all land on MLC first
            latency += dev.write_page(lpn, "mlc")
            if d.kind is Decision.COLD_INSERT:
                r.cold_inserts += 1
                r.mlc_write_ops += 1
            elif d.kind is Decision.WARM_REFRESH:
                r.warm_refreshes += 1
                r.mlc_write_ops += 1
            else:
                r.promotions += 1
                r.slc_write_ops += 1
                # demote first so SLC occupancy never exceeds hot_capacity
                if d.demoted is not None:
                    m = dev.migrate_page(d.demoted, "mlc")
                    r.demotions += 1
                    r.migration_latency_us += m
                    latency += m
                    migrations += 1
                m = dev.migrate_page(lpn, "slc")
                r.migration_latency_us += m
                latency += m
                migrations += 1

        r.migration_count += migrations
        r.total_latency_us += latency

        if (
            self.classifier is not None
            and self.mode.ahdm.adapt is not None
            and r.total_requests % self.adapt_interval == 0
        ):
            frac = dev.tier("slc").valid_pages / dev.tier("slc").config.total_pages
            r.threshold_trajectory.append(self.classifier.adapt(frac))

        if self.check:
            self.check_invariants()
        return RequestOutcome(latency, len(pages), tuple(decisions), migrations)

    def check_invariants(self) -> None:
        dev = self.device
        dev.check_invariants()
        if self.classifier is not None:
            self.classifier.check_invariants()
            hot = set(self.classifier.hot_items())
            for lpn in hot:
                loc = dev.location(lpn)
                assert loc is not None and loc.tier == "slc", (lpn, loc)
            for lpn, loc in dev.mapping.items():
                if lpn not in hot:
                    assert loc.tier == "mlc", (lpn, loc)
        programs = sum(t.programs for t in dev.tiers.values())
        relocations = sum(t.gc_relocations for t in dev.tiers.values())
        r = self.report_
        assert programs == r.write_page_ops + relocations + r.migration_count

    def report(self) -> SimReport:
        r = self.report_
        r.hot_fraction = (r.promotions + r.hot_hits) / r.write_page_ops if r.write_page_ops else 0.0
        r.mean_access_time_us = r.total_latency_us / r.total_requests if r.total_requests else 0.0
        r.tiers = {}
        r.gc_latency_us = 0
        for name, t in self.device.tiers.items():
            stats = t.stats()
            r.tiers[name] = TierReport(
                kind=name,
                blocks=t.config.total_blocks,
                pages_per_block=t.config.pages_per_block,
                chips=t.config.chips,
                mean_programs_per_block=stats.mean_programs_per_block,
                max_erase_cycles=stats.max_erase_cycles,
                saturated=stats.saturated,
                live_fraction=stats.live_fraction,
                reads=t.reads,
                programs=t.programs,
                erases=t.erases,
                host_programs=t.host_programs,
                migration_programs=t.migration_programs,
                gc_relocations=t.gc_relocations,
                gc_latency_us=t.gc_latency_us,
            )
            r.gc_latency_us += t.gc_latency_us
        r.slc_chips = r.tiers["slc"].chips if "slc" in r.tiers else 0
        r.mlc_chips = r.tiers["mlc"].chips if "mlc" in r.tiers else 0
        r.price_usd = float(price(r.slc_chips, r.mlc_chips, self.price_model))
        r.saturated = any(t.saturated for t in r.tiers.values())
        if r.saturated:
            log.warning("%s: flash tier exceeded its endurance", r.mode)
        return r


def run(
    trace: Iterable[TraceRecord],
    mode: DeviceMode,
    adapt_interval: int = 1000,
    price_model: PriceModel = PriceModel(),
    check: bool = False,
) -> SimReport:
    sim = Simulator(mode, adapt_interval, price_model, check)
    empty = True
    for record in trace:
        empty = False
        sim.process(record)
    if empty:
        raise ValueError("trace is empty")
    return sim.report()


def replay_deterministic(
    trace: Iterable[TraceRecord], mode: DeviceMode, runs: int = 2, adapt_interval: int = 1000
) -> bool:
    records = list(trace)
    outputs = {emit_report(run(records, mode, adapt_interval), "json") for _ in range(runs)}
    return len(outputs) == 1
