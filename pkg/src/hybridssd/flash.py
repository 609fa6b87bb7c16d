"""Page-mapped flash model for an SLC tier and an MLC tier.

Each tier is log-structured: writes go to an append point in the active
block, overwrites invalidate the old copy, and greedy garbage collection
reclaims the block with the most invalid pages. Every page program and
block erase is counted so wear and latency can be recomputed from the
primitive counters.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Deque, Dict, List, NamedTuple, Optional, Tuple

FREE = -1
INVALID = -2


class TierKind(enum.Enum):
    SLC = "slc"
    MLC = "mlc"


class FlashError(RuntimeError):
    pass


class Unmapped(FlashError, KeyError):
    def __init__(self, lpn: int):
        self.lpn = lpn
        super().__init__(f"logical page {lpn} is not mapped")

    def __str__(self):
        return self.args[0]


class TierFull(FlashError):
    pass


class NoReclaimableBlock(FlashError):
    pass


@dataclass(frozen=True)
class TierConfig:
    kind: TierKind
    pages_per_block: int
    num_blocks: int
    read_us: int
    program_us: int
    erase_us: int = 500
    endurance: int = 10_000
    gc_free_block_threshold: int = 1
    page_size_bytes: int = 4096
    chips: int = 1

    def __post_init__(self):
        if min(self.read_us, self.program_us, self.erase_us) <= 0:
            raise ValueError("timing values must be positive")
        if self.gc_free_block_threshold < 1:
            raise ValueError("gc_free_block_threshold must be >= 1")
        if self.num_blocks <= self.gc_free_block_threshold:
            raise ValueError("num_blocks must exceed gc_free_block_threshold")
        if min(self.pages_per_block, self.endurance, self.page_size_bytes, self.chips) < 1:
            raise ValueError("geometry values must be positive")

    @classmethod
    def slc(cls, **kw) -> "TierConfig":
        # 256 KB block / 4 KB page
        params = dict(pages_per_block=64, num_blocks=64, read_us=45, program_us=240,
                      erase_us=500, endurance=100_000)
        params.update(kw)
        return cls(TierKind.SLC, **params)

    @classmethod
    def mlc(cls, **kw) -> "TierConfig":
        # 512 KB block / 4 KB page
        params = dict(pages_per_block=128, num_blocks=64, read_us=50, program_us=1000,
                      erase_us=500, endurance=10_000)
        params.update(kw)
        return cls(TierKind.MLC, **params)

    @property
    def name(self) -> str:
        return self.kind.value

    @property
    def total_blocks(self) -> int:
        return self.num_blocks * self.chips

    @property
    def total_pages(self) -> int:
        return self.total_blocks * self.pages_per_block

    @property
    def usable_pages(self) -> int:
        """Live pages the tier can hold while GC is still guaranteed a victim.

        The active block and the GC free-block reserve are excluded.
        """
        return (self.total_blocks - self.gc_free_block_threshold - 1) * self.pages_per_block


@dataclass
class BlockState:
    valid_count: int = 0
    invalid_count: int = 0
    free_count: int = 0
    erase_cycles: int = 0
    program_count: int = 0


@dataclass(frozen=True)
class TierStats:
    mean_programs_per_block: float
    max_erase_cycles: int
    saturated: bool
    live_fraction: float


class Location(NamedTuple):
    tier: str
    block: int
    page: int


@dataclass
class FlashTier:
    config: TierConfig
    blocks: List[BlockState] = field(init=False)
    pages: List[List[int]] = field(init=False)  # reverse map: lpn, FREE or INVALID
    versions: List[List[int]] = field(init=False)
    free_blocks: Deque[int] = field(init=False)
    active: Optional[int] = None
    write_ptr: int = 0
    saturated: bool = False
    reads: int = 0
    programs: int = 0
    erases: int = 0
    host_programs: int = 0
    migration_programs: int = 0
    gc_relocations: int = 0
    gc_latency_us: int = 0
    valid_pages: int = 0

    def __post_init__(self):
        n, ppb = self.config.total_blocks, self.config.pages_per_block
        self.blocks = [BlockState(free_count=ppb) for _ in range(n)]
        self.pages = [[FREE] * ppb for _ in range(n)]
        self.versions = [[0] * ppb for _ in range(n)]
        self.free_blocks = deque(range(n))

    @property
    def name(self) -> str:
        return self.config.name

    def active_has_room(self) -> bool:
        return self.active is not None and self.write_ptr < self.config.pages_per_block

    def stats(self) -> TierStats:
        n = len(self.blocks)
        return TierStats(
            mean_programs_per_block=sum(b.program_count for b in self.blocks) / n,
            max_erase_cycles=max(b.erase_cycles for b in self.blocks),
            saturated=self.saturated,
            live_fraction=self.valid_pages / self.config.total_pages,
        )


class FlashDevice:
    """One or two flash tiers sharing a single logical page map."""

    def __init__(self, *configs: TierConfig):
        if not configs:
            raise ValueError("at least one tier is required")
        self.tiers: Dict[str, FlashTier] = {}
        for cfg in configs:
            if cfg.name in self.tiers:
                raise ValueError(f"duplicate tier {cfg.name}")
            self.tiers[cfg.name] = FlashTier(cfg)
        self.mapping: Dict[int, Location] = {}
        self._clock = 0

    def tier(self, name: str) -> FlashTier:
        try:
            return self.tiers[name]
        except KeyError:
            raise ValueError(f"no tier named {name!r}") from None

    def location(self, lpn: int) -> Optional[Location]:
        return self.mapping.get(lpn)

    # -- host-visible operations -------------------------------------------

    def read_page(self, lpn: int) -> int:
        loc = self.mapping.get(lpn)
        if loc is None:
            raise Unmapped(lpn)
        t = self.tiers[loc.tier]
        t.reads += 1
        return t.config.read_us

    def read_unmapped(self, tier: str) -> int:
        """Charge a read of never-written data to ``tier`` without mapping it."""
        t = self.tier(tier)
        t.reads += 1
        return t.config.read_us

    def write_page(self, lpn: int, tier: str) -> int:
        self._clock += 1
        t = self.tier(tier)
        t.host_programs += 1
        return self._program(lpn, t, self._clock)

    def migrate_page(self, lpn: int, dst: str) -> int:
        loc = self.mapping.get(lpn)
        if loc is None:
            raise Unmapped(lpn)
        if loc.tier == dst:
            raise ValueError(f"page {lpn} already resides on {dst}")
        src = self.tiers[loc.tier]
        t = self.tier(dst)
        src.reads += 1
        version = src.versions[loc.block][loc.page]
        t.migration_programs += 1
        return src.config.read_us + self._program(lpn, t, version)

    def run_gc(self, tier: str) -> int:
        """Greedy GC: reclaim until the free-block reserve is restored.

        At least one block is reclaimed even if the reserve already holds.
        """
        t = self.tier(tier)
        return self._collect(t, strict=True)

    def tier_stats(self, tier: str) -> TierStats:
        return self.tier(tier).stats()

    # -- internals ----------------------------------------------------------

    def _invalidate(self, loc: Location) -> None:
        t = self.tiers[loc.tier]
        t.pages[loc.block][loc.page] = INVALID
        blk = t.blocks[loc.block]
        blk.valid_count -= 1
        blk.invalid_count += 1
        t.valid_pages -= 1

    def _program(self, lpn: int, t: FlashTier, version: int) -> int:
        old = self.mapping.pop(lpn, None)
        if old is not None:
            self._invalidate(old)
        latency = 0
        if not t.active_has_room():
            self._open_block(t)
            if len(t.free_blocks) < t.config.gc_free_block_threshold:
                latency += self._collect(t, strict=False)
        b, p = self._place(t, lpn, version)
        self.mapping[lpn] = Location(t.name, b, p)
        return latency + t.config.program_us

    def _open_block(self, t: FlashTier) -> None:
        if not t.free_blocks:
            raise TierFull(f"{t.name} tier has no free block")
        t.active = t.free_blocks.popleft()
        t.write_ptr = 0

    def _place(self, t: FlashTier, lpn: int, version: int) -> Tuple[int, int]:
        if not t.active_has_room():
            self._open_block(t)
        b, p = t.active, t.write_ptr
        t.write_ptr += 1
        t.pages[b][p] = lpn
        t.versions[b][p] = version
        blk = t.blocks[b]
        blk.free_count -= 1
        blk.valid_count += 1
        blk.program_count += 1
        t.programs += 1
        t.valid_pages += 1
        return b, p

    def _pick_victim(self, t: FlashTier) -> Optional[int]:
        best, best_invalid = None, 0
        for i, blk in enumerate(t.blocks):
            if i == t.active:
                continue
            if blk.invalid_count > best_invalid:
                best, best_invalid = i, blk.invalid_count
        return best

    def _room(self, t: FlashTier) -> int:
        room = len(t.free_blocks) * t.config.pages_per_block
        if t.active is not None:
            room += t.config.pages_per_block - t.write_ptr
        return room

    def _collect(self, t: FlashTier, strict: bool) -> int:
        cfg = t.config
        latency = 0
        rounds = 0
        while rounds == 0 or len(t.free_blocks) < cfg.gc_free_block_threshold:
            victim = self._pick_victim(t)
            if victim is None or t.blocks[victim].valid_count > self._room(t):
                if strict and rounds == 0:
                    raise NoReclaimableBlock(f"{t.name}: every candidate block is fully valid")
                break
            latency += self._reclaim(t, victim)
            rounds += 1
        t.gc_latency_us += latency
        return latency

    def _reclaim(self, t: FlashTier, victim: int) -> int:
        cfg = t.config
        latency = 0
        row, vers = t.pages[victim], t.versions[victim]
        for p, lpn in enumerate(row):
            if lpn < 0:
                continue
            t.reads += 1
            t.gc_relocations += 1
            blk = t.blocks[victim]
            blk.valid_count -= 1
            blk.invalid_count += 1
            t.valid_pages -= 1
            row[p] = INVALID
            b, q = self._place(t, lpn, vers[p])
            self.mapping[lpn] = Location(t.name, b, q)
            latency += cfg.read_us + cfg.program_us
        blk = t.blocks[victim]
        blk.valid_count = blk.invalid_count = 0
        blk.free_count = cfg.pages_per_block
        blk.erase_cycles += 1
        if blk.erase_cycles > cfg.endurance:
            t.saturated = True
        t.pages[victim] = [FREE] * cfg.pages_per_block
        t.versions[victim] = [0] * cfg.pages_per_block
        t.erases += 1
        t.free_blocks.append(victim)
        return latency + cfg.erase_us

    # -- verification helpers -------------------------------------------------

    def snapshot(self) -> Dict[int, Tuple[str, int]]:
        """lpn -> (tier, content version); unchanged by GC."""
        return {
            lpn: (loc.tier, self.tiers[loc.tier].versions[loc.block][loc.page])
            for lpn, loc in self.mapping.items()
        }

    def check_invariants(self) -> None:
        seen = 0
        for t in self.tiers.values():
            ppb = t.config.pages_per_block
            live = 0
            for b, (blk, row) in enumerate(zip(t.blocks, t.pages)):
                n_invalid, n_free = row.count(INVALID), row.count(FREE)
                assert blk.valid_count + blk.invalid_count + blk.free_count == ppb, (t.name, b)
                assert (blk.invalid_count, blk.free_count) == (n_invalid, n_free), (t.name, b)
                assert blk.valid_count == ppb - n_invalid - n_free, (t.name, b)
                if blk.erase_cycles > t.config.endurance:
                    assert t.saturated, (t.name, b)
                if blk.valid_count:
                    for p, lpn in enumerate(row):
                        if lpn >= 0:
                            assert self.mapping.get(lpn) == (t.name, b, p), (t.name, b, p, lpn)
                live += blk.valid_count
            assert live == t.valid_pages, t.name
            assert t.programs == t.host_programs + t.migration_programs + t.gc_relocations
            seen += live
        assert seen == len(self.mapping)
