import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hybridssd.flash import (
    FlashDevice,
    NoReclaimableBlock,
    TierConfig,
    TierFull,
    Unmapped,
)

SLC_READ, SLC_PROG, MLC_READ, MLC_PROG, ERASE = 45, 240, 50, 1000, 500


def toy(nb=4, ppb=4, **kw):
    return FlashDevice(TierConfig.slc(num_blocks=nb, pages_per_block=ppb, **kw))


def test_defaults_follow_device_table():
    slc, mlc = TierConfig.slc(), TierConfig.mlc()
    assert (slc.read_us, slc.program_us, slc.erase_us) == (45, 240, 500)
    assert (mlc.read_us, mlc.program_us, mlc.erase_us) == (50, 1000, 500)
    assert slc.pages_per_block * slc.page_size_bytes == 256 * 1024
    assert mlc.pages_per_block * mlc.page_size_bytes == 512 * 1024
    assert slc.endurance == 10 * mlc.endurance


def test_read_latency_by_tier():
    dev = FlashDevice(TierConfig.slc(), TierConfig.mlc())
    dev.write_page(1, "slc")
    dev.write_page(2, "mlc")
    assert dev.read_page(1) == 45
    assert dev.read_page(2) == 50
    with pytest.raises(Unmapped):
        dev.read_page(3)


def test_fresh_writes():
    dev = FlashDevice(TierConfig.slc(), TierConfig.mlc())
    assert dev.write_page(0, "mlc") == 1000
    assert sorted(b.program_count for b in dev.tier("mlc").blocks)[-2:] == [0, 1]
    assert dev.write_page(1, "slc") == 240


def test_overwrite_leaves_one_stale_page():
    dev = toy()
    dev.write_page(0, "slc")
    dev.write_page(0, "slc")
    blocks = dev.tier("slc").blocks
    assert sum(b.valid_count for b in blocks) == 1
    assert sum(b.invalid_count for b in blocks) == 1


def test_gc_erases_fully_invalid_block():
    dev = toy()
    for lpn in [0, 1, 2, 3, 0, 1, 2, 3]:
        dev.write_page(lpn, "slc")
    assert dev.run_gc("slc") == ERASE
    assert dev.tier("slc").blocks[0].erase_cycles == 1


def test_gc_relocates_one_valid_page():
    dev = toy()
    for lpn in [0, 1, 2, 3, 4, 5, 6, 7, 0, 1, 2]:
        dev.write_page(lpn, "slc")
    # block 0 holds a single valid page (lpn 3)
    assert dev.run_gc("slc") == SLC_READ + SLC_PROG + ERASE
    assert dev.location(3).block == 2


def test_write_beyond_capacity_triggers_gc():
    dev = toy()
    lat = [dev.write_page(lpn, "slc") for lpn in [0, 1, 2, 3, 4, 5, 6, 7, 0, 1, 2, 8]]
    assert lat == [SLC_PROG] * 12
    # opening block 3 empties the free list: GC reclaims block 0 (3 invalid, lpn 3 valid)
    assert dev.write_page(9, "slc") == SLC_PROG + (SLC_READ + SLC_PROG) + ERASE
    dev.check_invariants()


def test_fully_invalid_victim_inside_write():
    dev = toy()
    for lpn in [0, 1, 2, 3, 4, 5, 6, 7, 0, 1, 2, 3]:
        dev.write_page(lpn, "slc")
    assert dev.write_page(0, "slc") == SLC_PROG + ERASE


def test_no_reclaimable_block():
    dev = toy()
    for lpn in range(8):
        dev.write_page(lpn, "slc")
    with pytest.raises(NoReclaimableBlock):
        dev.run_gc("slc")


def test_tier_full():
    dev = toy(nb=2, ppb=2)
    for lpn in range(4):
        dev.write_page(lpn, "slc")
    with pytest.raises(TierFull):
        dev.write_page(4, "slc")


def test_migration_latency():
    dev = FlashDevice(TierConfig.slc(), TierConfig.mlc())
    dev.write_page(7, "mlc")
    assert dev.migrate_page(7, "slc") == MLC_READ + SLC_PROG
    assert dev.location(7).tier == "slc"
    assert dev.migrate_page(7, "mlc") == SLC_READ + MLC_PROG
    assert dev.tier("slc").valid_pages == 0
    with pytest.raises(Unmapped):
        dev.migrate_page(99, "slc")
    with pytest.raises(ValueError):
        dev.migrate_page(7, "mlc")


def test_tier_stats():
    dev = FlashDevice(TierConfig.slc(num_blocks=10, pages_per_block=1))
    s = dev.tier_stats("slc")
    assert (s.mean_programs_per_block, s.max_erase_cycles, s.saturated, s.live_fraction) == (0, 0, False, 0)
    for lpn in range(10):
        dev.write_page(lpn, "slc")
    s = dev.tier_stats("slc")
    assert s.mean_programs_per_block == 1.0
    assert s.live_fraction == 1.0


def test_saturation_past_endurance():
    dev = toy(nb=3, ppb=2, endurance=3)
    saturated_at = None
    for i in range(40):
        dev.write_page(0, "slc")
        if saturated_at is None and dev.tier_stats("slc").saturated:
            saturated_at = i
    assert saturated_at is not None
    s = dev.tier_stats("slc")
    assert s.max_erase_cycles > 3
    dev.check_invariants()


def test_tier_config_validation():
    with pytest.raises(ValueError):
        TierConfig.slc(num_blocks=1)
    with pytest.raises(ValueError):
        TierConfig.slc(read_us=0)
    with pytest.raises(ValueError):
        TierConfig.mlc(gc_free_block_threshold=0)


def primitive_latency(dev):
    return sum(
        t.reads * t.config.read_us + t.programs * t.config.program_us + t.erases * t.config.erase_us
        for t in dev.tiers.values()
    )


op = st.tuples(st.sampled_from(["w_slc", "w_mlc", "mig", "read", "gc_slc", "gc_mlc"]), st.integers(0, 39))


@settings(max_examples=150, deadline=None)
@given(st.lists(op, max_size=400))
def test_device_fuzz_invariants(ops):
    dev = FlashDevice(
        TierConfig.slc(num_blocks=8, pages_per_block=8, endurance=5),
        TierConfig.mlc(num_blocks=8, pages_per_block=8, endurance=5),
    )
    total = 0
    last_wear = {}
    for kind, lpn in ops:
        before = dev.snapshot()
        if kind == "w_slc":
            total += dev.write_page(lpn, "slc")
        elif kind == "w_mlc":
            total += dev.write_page(lpn, "mlc")
        elif kind == "mig":
            loc = dev.location(lpn)
            if loc is None:
                continue
            total += dev.migrate_page(lpn, "mlc" if loc.tier == "slc" else "slc")
        elif kind == "read":
            try:
                total += dev.read_page(lpn)
            except Unmapped:
                pass
        else:
            try:
                total += dev.run_gc(kind[3:])
            except NoReclaimableBlock:
                pass
            assert dev.snapshot() == before
        dev.check_invariants()
        assert total == primitive_latency(dev)
        for t in dev.tiers.values():
            for i, b in enumerate(t.blocks):
                key = (t.name, i)
                prev = last_wear.get(key, (0, 0))
                assert b.program_count >= prev[0] and b.erase_cycles >= prev[1]
                last_wear[key] = (b.program_count, b.erase_cycles)


def test_mapping_consistency_long_fuzz():
    rng = random.Random(5)
    dev = FlashDevice(
        TierConfig.slc(num_blocks=8, pages_per_block=8),
        TierConfig.mlc(num_blocks=8, pages_per_block=8),
    )
    for i in range(20_000):
        lpn = rng.randrange(40)
        loc = dev.location(lpn)
        if loc is not None and rng.random() < 0.3:
            dev.migrate_page(lpn, "mlc" if loc.tier == "slc" else "slc")
        else:
            dev.write_page(lpn, rng.choice(["slc", "mlc"]))
        if i % 97 == 0:
            dev.check_invariants()
    dev.check_invariants()
