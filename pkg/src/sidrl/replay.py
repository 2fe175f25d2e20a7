"""Two-tier experience replay.

Every transition lands in the main ring buffer; a second, smaller ring
additionally receives the ones whose TD error stood out — strictly
above the running mean plus two standard deviations of all TD errors
seen so far, evaluated before the new error is folded into the stats.
Batches mix a fixed quota from each tier, falling back to main-only
while the high tier is still empty.

Producers append, one consumer samples; a coarse lock keeps batches
free of half-written entries at desk scale.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from .intrinsic import RunningStats


@dataclass(frozen=True, slots=True)
class Transition:
    """K-step actor record plus the leading 1-step pair.

    ``discounted_reward_sum`` holds sum_{j=1..k} gamma^(j-1) r_j of
    extrinsic rewards for up to K steps starting at (s_start, a_start);
    ``s_end`` is where the window ended.  ``pair_s``/``pair_s_next`` are
    the first step of the window, stored for 1-step learners (successor
    features, forward models).  ``pair_reward`` is that single step's
    extrinsic reward.
    """

    s_start: int
    a_start: int
    discounted_reward_sum: float
    s_end: int
    done: bool
    pair_s: int
    pair_s_next: int
    pair_reward: float
    episode_id: int
    step_index: int


class _Ring:
    """Fixed-capacity list with oldest-first overwrite."""

    def __init__(self, capacity: int):
        if capacity <= 0:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self.items: list = []
        self._next = 0

    def append(self, item) -> None:
        if len(self.items) < self.capacity:
            self.items.append(item)
        else:
            self.items[self._next] = item
            self._next = (self._next + 1) % self.capacity

    def __len__(self) -> int:
        return len(self.items)


class TwoTierBuffer:
    def __init__(self, main_capacity: int = 40_000, high_capacity: int = 10_000):
        self.main = _Ring(main_capacity)
        self.high = _Ring(high_capacity)
        self.td_stats = RunningStats()
        self.last_split: tuple[int, int] = (0, 0)
        self._lock = threading.Lock()

    def gate(self, td_error: float) -> bool:
        """Would an error this size enter the high tier right now?
        False until at least one error is on record."""
        if self.td_stats.count == 0:
            return False
        return td_error > self.td_stats.mean + 2.0 * self.td_stats.std

    def push(self, t: Transition, td_error: float) -> None:
        if not np.isfinite(td_error) or td_error < 0.0:
            raise ValueError(f"td_error must be finite and >= 0, got {td_error!r}")
        with self._lock:
            high = self.gate(td_error)
            self.td_stats.push(td_error)
            self.main.append(t)
            if high:
                self.high.append(t)

    def sample(self, rng, batch: int = 128, split: tuple[int, int] = (96, 32)) -> list[Transition]:
        """Uniform-with-replacement draws: split[0] from main, split[1]
        from high; the high share falls back to main while that tier is
        empty.  Raises on an empty main buffer."""
        n_main, n_high = split
        if n_main + n_high != batch:
            raise ValueError("split must sum to batch")
        with self._lock:
            if len(self.main) == 0:
                raise ValueError("cannot sample from empty buffer")
            if len(self.high) == 0:
                n_main, n_high = batch, 0
            out = [self.main.items[i] for i in rng.integers(len(self.main), size=n_main)]
            if n_high:
                out.extend(self.high.items[i] for i in rng.integers(len(self.high), size=n_high))
            self.last_split = (n_main, n_high)
            return out

    def __len__(self) -> int:
        return len(self.main)

    @property
    def high_len(self) -> int:
        return len(self.high)
