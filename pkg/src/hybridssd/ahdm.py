"""Adaptive Hot Data Migration (AHDM) write classifier.

Two bounded LRU lists track written pages:

* ``W`` (warm) holds recently written pages with a referral count.
* ``H`` (hot) holds pages that live on the SLC tier.

A write to an unknown page enters the head of ``W`` with one referral.
Further writes bump the count and move the page to the head. Once a write
finds the count at the migration threshold, the page moves to the head of
``H``, pushing out the LRU tail of ``H`` if it is full. Writes to a page
already in ``H`` just refresh its position. Reads never touch either list.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple


class Decision(enum.Enum):
    COLD_INSERT = "cold_insert"
    WARM_REFRESH = "warm_refresh"
    PROMOTE = "promote"
    HOT_HIT = "hot_hit"


class ReadDecision(enum.Enum):
    ROUTINE = "routine"


@dataclass(frozen=True)
class WriteDecision:
    kind: Decision
    demoted: Optional[int] = None
    warm_evicted: Optional[int] = None


@dataclass(frozen=True)
class Watermark:
    """Nudge the threshold by SLC occupancy: up above ``high``, down below ``low``."""

    low: float
    high: float
    step: int = 1
    min_t: int = 1
    max_t: int = 64

    def __post_init__(self):
        if not 0.0 <= self.low < self.high <= 1.0:
            raise ValueError("watermarks need 0 <= low < high <= 1")
        if self.step < 1 or self.min_t < 1 or self.max_t < self.min_t:
            raise ValueError("step >= 1 and 1 <= min_t <= max_t required")


@dataclass(frozen=True)
class AhdmConfig:
    warm_capacity: int
    hot_capacity: int
    threshold: int = 2
    adapt: Optional[Watermark] = None

    def __post_init__(self):
        if self.warm_capacity < 1 or self.hot_capacity < 1:
            raise ValueError("list capacities must be positive")
        if self.threshold < 1:
            raise ValueError("threshold must be >= 1")
        if self.adapt is not None and not (
            self.adapt.min_t <= self.threshold <= self.adapt.max_t
        ):
            raise ValueError("threshold must lie within [min_t, max_t]")


class _Node:
    __slots__ = ("key", "value", "prev", "next")

    def __init__(self, key, value):
        self.key = key
        self.value = value
        self.prev: Optional[_Node] = None
        self.next: Optional[_Node] = None


class LRUList:
    """Recency-ordered list with O(1) insert/move/remove/evict via a dict index.

    ``steps`` counts primitive pointer and index operations so callers can
    check that per-operation cost does not grow with list length.
    """

    def __init__(self, capacity: int):
        self.capacity = capacity
        self._index: Dict[int, _Node] = {}
        self._head = _Node(None, None)  # sentinel; _head.next is MRU
        self._tail = _Node(None, None)  # sentinel; _tail.prev is LRU
        self._head.next = self._tail
        self._tail.prev = self._head
        self.steps = 0

    def __len__(self) -> int:
        return len(self._index)

    def __contains__(self, key) -> bool:
        self.steps += 1
        return key in self._index

    @property
    def full(self) -> bool:
        return len(self._index) >= self.capacity

    def get(self, key) -> Optional[_Node]:
        self.steps += 1
        return self._index.get(key)

    def _link_front(self, node: _Node) -> None:
        first = self._head.next
        node.prev = self._head
        node.next = first
        first.prev = node
        self._head.next = node
        self.steps += 4

    def _unlink(self, node: _Node) -> None:
        node.prev.next = node.next
        node.next.prev = node.prev
        node.prev = node.next = None
        self.steps += 2

    def push_front(self, key, value=None) -> _Node:
        node = _Node(key, value)
        self._index[key] = node
        self.steps += 1
        self._link_front(node)
        return node

    def move_front(self, node: _Node) -> None:
        self._unlink(node)
        self._link_front(node)

    def remove(self, node: _Node) -> None:
        self._unlink(node)
        del self._index[node.key]
        self.steps += 1

    def pop_back(self) -> _Node:
        node = self._tail.prev
        if node is self._head:
            raise IndexError("pop from empty LRUList")
        self.remove(node)
        return node

    def __iter__(self) -> Iterator[_Node]:
        node = self._head.next
        while node is not self._tail:
            yield node
            node = node.next

    def check(self) -> None:
        """Assert forward/backward traversal and the index agree."""
        fwd = [n.key for n in self]
        back = []
        node = self._tail.prev
        while node is not self._head:
            back.append(node.key)
            node = node.prev
        assert fwd == back[::-1], "broken back links"
        assert len(fwd) == len(set(fwd)) == len(self._index), "duplicate or stale keys"
        assert all(self._index[k].key == k for k in fwd), "index mismatch"
        assert len(fwd) <= self.capacity, "capacity exceeded"


class AhdmClassifier:
    def __init__(self, config: AhdmConfig):
        self.config = config
        self.threshold = config.threshold
        self.warm = LRUList(config.warm_capacity)
        self.hot = LRUList(config.hot_capacity)

    @property
    def steps(self) -> int:
        return self.warm.steps + self.hot.steps

    def on_write(self, lpn: int) -> WriteDecision:
        node = self.hot.get(lpn)
        if node is not None:
            self.hot.move_front(node)
            return WriteDecision(Decision.HOT_HIT)

        node = self.warm.get(lpn)
        if node is None:
            evicted = None
            if self.warm.full:
                evicted = self.warm.pop_back().key
            self.warm.push_front(lpn, 1)
            return WriteDecision(Decision.COLD_INSERT, warm_evicted=evicted)

        # referrals may exceed the threshold after adapt() lowered it
        if node.value < self.threshold:
            node.value += 1
            self.warm.move_front(node)
            return WriteDecision(Decision.WARM_REFRESH)

        self.warm.remove(node)
        demoted = None
        if self.hot.full:
            demoted = self.hot.pop_back().key
        self.hot.push_front(lpn)
        return WriteDecision(Decision.PROMOTE, demoted=demoted)

    def on_read(self, lpn: int) -> ReadDecision:
        return ReadDecision.ROUTINE

    def is_hot(self, lpn: int) -> bool:
        return lpn in self.hot

    def adapt(self, slc_live_fraction: float) -> int:
        policy = self.config.adapt
        if policy is None:
            return self.threshold
        if slc_live_fraction > policy.high:
            self.threshold = min(self.threshold + policy.step, policy.max_t)
        elif slc_live_fraction < policy.low:
            self.threshold = max(self.threshold - policy.step, policy.min_t)
        return self.threshold

    def warm_items(self) -> List[Tuple[int, int]]:
        return [(n.key, n.value) for n in self.warm]

    def hot_items(self) -> List[int]:
        return [n.key for n in self.hot]

    def state(self) -> tuple:
        return (tuple(self.warm_items()), tuple(self.hot_items()), self.threshold)

    def check_invariants(self) -> None:
        self.warm.check()
        self.hot.check()
        w = {k for k, _ in self.warm_items()}
        assert w.isdisjoint(self.hot_items()), "W and H overlap"
        assert all(r >= 1 for _, r in self.warm_items()), "non-positive referral count"
