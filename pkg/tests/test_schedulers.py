"""Slot-level task scheduling for the two-head agent."""

from random import Random

import numpy as np
import pytest

from sidrl.config import RunConfig
from sidrl.qlearn import EXTRINSIC, INTRINSIC
from sidrl.sid import (
    MacroQScheduler,
    RandomScheduler,
    SlotContext,
    SwitchingScheduler,
    ThresholdQScheduler,
    macro_q_update,
    make_scheduler,
)


def ctx(slot_index=0, state=0, q=0.0, mean=0.0):
    return SlotContext(slot_index=slot_index, state=state,
                       q_extrinsic_value_at_state=q, running_q_mean=mean)


def test_random_scheduler_frequency_near_half():
    sched = RandomScheduler()
    rng = Random(0)
    n = 10_000
    picks = sum(sched.next_task(ctx(), rng) == EXTRINSIC for _ in range(n))
    assert 0.47 <= picks / n <= 0.53


def test_switching_scheduler_alternates_starting_extrinsic():
    sched = SwitchingScheduler()
    rng = Random(0)
    tasks = [sched.next_task(ctx(slot_index=i), rng) for i in range(6)]
    assert tasks == [EXTRINSIC, INTRINSIC, EXTRINSIC, INTRINSIC, EXTRINSIC, INTRINSIC]


def test_threshold_running_mean_variant():
    sched = ThresholdQScheduler("running_mean")
    rng = Random(0)
    assert sched.next_task(ctx(q=4.0, mean=5.0), rng) == INTRINSIC
    assert sched.next_task(ctx(q=6.0, mean=5.0), rng) == EXTRINSIC
    assert sched.next_task(ctx(q=5.0, mean=5.0), rng) == EXTRINSIC


def test_threshold_heuristic_variant_uses_fixed_level():
    sched = ThresholdQScheduler("heuristic_median", threshold=0.007)
    rng = Random(0)
    assert sched.next_task(ctx(q=0.001, mean=100.0), rng) == INTRINSIC
    assert sched.next_task(ctx(q=1.0, mean=-100.0), rng) == EXTRINSIC


def test_threshold_rejects_unknown_variant():
    with pytest.raises(ValueError):
        ThresholdQScheduler("percentile_90")


def test_macro_q_fixed_point_single_state():
    # Q(s, t) = r + gamma^m * max Q(s, .); with one state and the updated
    # task dominating, the fixed point is r / (1 - gamma^m).
    gamma, m, r = 0.99, 10, 1.0
    sched = MacroQScheduler(n_states=1, epsilon=0.0, alpha=0.1, gamma=gamma)
    for _ in range(20_000):
        sched.update(0, 0, EXTRINSIC, r, m, done=False)
    expected = r / (1.0 - gamma**m)
    assert abs(sched.macro_q[0, EXTRINSIC] - expected) < 1e-3 * expected
    assert sched.macro_q[0, INTRINSIC] == 0.0


def test_macro_q_terminal_update_drops_bootstrap():
    sched = MacroQScheduler(n_states=2, alpha=1.0)
    sched.macro_q[1, :] = 50.0
    sched.update(0, 1, INTRINSIC, 3.0, m=7, done=True)
    assert sched.macro_q[0, INTRINSIC] == 3.0


def test_macro_q_greedy_and_exploring_picks():
    sched = MacroQScheduler(n_states=1, epsilon=0.0)
    sched.macro_q[0, INTRINSIC] = 1.0
    assert sched.next_task(ctx(state=0), Random(0)) == INTRINSIC
    sched.epsilon = 1.0
    rng = Random(0)
    picks = [sched.next_task(ctx(state=0), rng) for _ in range(2000)]
    frac = sum(p == EXTRINSIC for p in picks) / len(picks)
    assert 0.45 <= frac <= 0.55


def test_macro_q_update_helper_rejects_other_kinds():
    with pytest.raises(ValueError):
        macro_q_update(RandomScheduler(), 0, 0, EXTRINSIC, 1.0, 5)
    sched = MacroQScheduler(n_states=1, alpha=1.0)
    macro_q_update(sched, 0, 0, EXTRINSIC, 2.0, 1, done=True)
    assert sched.macro_q[0, EXTRINSIC] == 2.0


def test_make_scheduler_dispatch():
    base = dict(env="chain:4", agent="sid", intrinsic_kind="sfc")
    assert isinstance(make_scheduler(RunConfig(**base), 4), RandomScheduler)
    assert isinstance(
        make_scheduler(RunConfig(scheduler="switching", **base), 4),
        SwitchingScheduler)
    sched = make_scheduler(
        RunConfig(scheduler="threshold_q", threshold_variant="heuristic_median",
                  threshold=0.25, **base), 4)
    assert isinstance(sched, ThresholdQScheduler)
    assert sched.variant == "heuristic_median" and sched.threshold == 0.25
    mq = make_scheduler(
        RunConfig(scheduler="macro_q", macro_epsilon=0.2, macro_alpha=0.05, **base), 4)
    assert isinstance(mq, MacroQScheduler)
    assert mq.macro_q.shape == (4, 2)
    assert mq.epsilon == 0.2 and mq.alpha == 0.05
