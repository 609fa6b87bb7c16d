import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hybridssd.ahdm import (
    AhdmClassifier,
    AhdmConfig,
    Decision,
    ReadDecision,
    Watermark,
)
from reference import ListClassifier, decision_tuple


def make(warm=8, hot=4, threshold=2, adapt=None):
    return AhdmClassifier(AhdmConfig(warm, hot, threshold, adapt))


def test_flowchart_walkthrough():
    c = make(threshold=2)
    assert c.on_write(5).kind is Decision.COLD_INSERT
    assert c.warm_items() == [(5, 1)] and c.hot_items() == []
    assert c.on_write(5).kind is Decision.WARM_REFRESH
    assert c.warm_items() == [(5, 2)]
    d = c.on_write(5)
    assert d.kind is Decision.PROMOTE and d.demoted is None
    assert c.warm_items() == [] and c.hot_items() == [5]
    assert c.on_write(5).kind is Decision.HOT_HIT


def test_full_hot_list_demotes_tail():
    c = make(hot=1, threshold=1)
    c.on_write(5)
    c.on_write(5)
    assert c.hot_items() == [5]
    c.on_write(9)
    d = c.on_write(9)
    assert d.kind is Decision.PROMOTE and d.demoted == 5
    assert c.hot_items() == [9]
    assert not c.is_hot(5) and c.is_hot(9)


def test_full_warm_list_evicts_tail():
    c = make(warm=2, threshold=3)
    c.on_write(1)
    c.on_write(2)
    c.on_write(1)  # 1 becomes MRU
    d = c.on_write(3)
    assert d.kind is Decision.COLD_INSERT and d.warm_evicted == 2
    assert c.warm_items() == [(3, 1), (1, 2)]
    # evicted page starts over
    assert c.on_write(2).kind is Decision.COLD_INSERT


def test_hot_hit_moves_to_front():
    c = make(hot=3, threshold=1)
    for lpn in (1, 2, 3):
        c.on_write(lpn)
        c.on_write(lpn)
    assert c.hot_items() == [3, 2, 1]
    c.on_write(1)
    assert c.hot_items() == [1, 3, 2]


def test_reads_do_not_touch_state():
    c = make()
    c.on_write(5)
    before = c.state()
    assert c.on_read(5) is ReadDecision.ROUTINE
    assert c.on_read(12345) is ReadDecision.ROUTINE
    assert c.state() == before


def test_is_hot_empty():
    assert not make().is_hot(5)


@pytest.mark.parametrize("threshold", [1, 2, 3, 7])
def test_promotion_on_write_threshold_plus_one(threshold):
    c = make(warm=4, hot=4, threshold=threshold)
    kinds = [c.on_write(42).kind for _ in range(threshold + 1)]
    assert kinds[-1] is Decision.PROMOTE
    assert Decision.PROMOTE not in kinds[:-1]


def test_adapt_watermark():
    wm = Watermark(low=0.3, high=0.9, step=1, min_t=1, max_t=8)
    c = make(threshold=4, adapt=wm)
    assert c.adapt(0.95) == 5
    c.threshold = 4
    assert c.adapt(0.1) == 3
    assert c.adapt(0.5) == 3
    c.threshold = 8
    assert c.adapt(0.99) == 8
    c.threshold = 1
    assert c.adapt(0.0) == 1


def test_adapt_off_is_constant():
    c = make(threshold=3)
    assert c.adapt(0.99) == 3 and c.adapt(0.0) == 3


def test_lowered_threshold_promotes_saturated_entries():
    wm = Watermark(low=0.3, high=0.9, step=2, min_t=1, max_t=8)
    c = make(threshold=3, adapt=wm)
    for _ in range(3):
        c.on_write(7)
    assert c.warm_items() == [(7, 3)]
    c.adapt(0.0)  # threshold 3 -> 1
    assert c.warm_items() == [(7, 3)]
    assert c.on_write(7).kind is Decision.PROMOTE


def test_config_validation():
    with pytest.raises(ValueError):
        AhdmConfig(0, 1)
    with pytest.raises(ValueError):
        AhdmConfig(1, 1, threshold=0)
    with pytest.raises(ValueError):
        AhdmConfig(1, 1, threshold=9, adapt=Watermark(0.1, 0.9, 1, 1, 8))
    with pytest.raises(ValueError):
        Watermark(0.9, 0.1)


ops = st.lists(st.tuples(st.booleans(), st.integers(0, 12)), max_size=200)


@settings(max_examples=300)
@given(
    ops,
    st.integers(1, 5),
    st.integers(1, 5),
    st.integers(1, 4),
)
def test_matches_reference(seq, warm, hot, threshold):
    c = make(warm, hot, threshold)
    ref = ListClassifier(warm, hot, threshold)
    for is_write, lpn in seq:
        if is_write:
            assert decision_tuple(c.on_write(lpn)) == ref.write(lpn)
        else:
            assert c.on_read(lpn).value == ref.read(lpn)
        assert c.state() == ref.state()
        c.check_invariants()


def test_reads_interleaved_do_not_change_decisions():
    rng = random.Random(11)
    writes = [rng.randrange(64) for _ in range(5000)]
    plain = make(32, 8, 2)
    mixed = make(32, 8, 2)
    ref = ListClassifier(32, 8, 2)
    expected = [ref.write(w) for w in writes]
    got_plain = [decision_tuple(plain.on_write(w)) for w in writes]
    got_mixed = []
    reads_left = 10_000
    for w in writes:
        for _ in range(2):
            if reads_left:
                mixed.on_read(rng.randrange(64))
                reads_left -= 1
        got_mixed.append(decision_tuple(mixed.on_write(w)))
    assert got_plain == got_mixed == expected


def test_step_count_constant_per_op():
    # cost per op must not depend on list length
    for cap in (16, 1024):
        c = make(warm=4 * cap, hot=cap, threshold=2)
        rng = random.Random(3)
        worst = 0
        for _ in range(20_000):
            before = c.steps
            c.on_write(rng.randrange(8 * cap))
            worst = max(worst, c.steps - before)
        assert worst <= 16
