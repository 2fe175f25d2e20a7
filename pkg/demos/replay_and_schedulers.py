"""Poke the replay gate and the slot schedulers with synthetic streams.

Part one pushes a reward-error stream with planted outliers through the
two-tier buffer and reports what fraction of each population the high
tier captured.  Part two replays one synthetic episode through each
scheduler kind and prints the task letter it assigns to every slot.
"""

import argparse
from random import Random

import numpy as np

from sidrl.qlearn import EXTRINSIC
from sidrl.replay import Transition, TwoTierBuffer
from sidrl.sid import (
    MacroQScheduler,
    RandomScheduler,
    SlotContext,
    SwitchingScheduler,
    ThresholdQScheduler,
)


def stub(i):
    return Transition(s_start=i, a_start=0, discounted_reward_sum=0.0,
                      s_end=i, done=False, pair_s=i, pair_s_next=i,
                      pair_reward=0.0, episode_id=0, step_index=i)


def replay_demo(seed):
    rng = np.random.default_rng(seed)
    buf = TwoTierBuffer()
    outliers = set()
    for i in range(5000):
        if rng.random() < 0.01:
            err = float(rng.uniform(8.0, 12.0))
            outliers.add(i)
        else:
            err = float(abs(rng.normal(1.0, 0.3)))
        buf.push(stub(i), err)
    high_ids = {t.s_start for t in buf.high.items}
    caught = len(high_ids & outliers)
    print(f"replay gate: {caught}/{len(outliers)} planted outliers in the "
          f"high tier, {len(high_ids - outliers)} ordinary transitions "
          f"slipped in, tier sizes {len(buf)}/{buf.high_len}")
    batch = buf.sample(rng)
    print(f"sampled batch: {len(batch)} transitions, split "
          f"{buf.last_split} (main, high)")


def scheduler_demo(seed, slots):
    rng = Random(seed)
    # q rises along the episode, as if value had propagated to late slots
    contexts = [
        SlotContext(slot_index=i, state=i,
                    q_extrinsic_value_at_state=i * 0.002,
                    running_q_mean=0.007)
        for i in range(slots)
    ]
    kinds = {
        "random": RandomScheduler(),
        "switching": SwitchingScheduler(),
        "threshold_q": ThresholdQScheduler("heuristic_median",
                                           threshold=0.007),
        "macro_q": MacroQScheduler(n_states=slots, epsilon=0.2),
    }
    print(f"task per slot over {slots} slots (E extrinsic, I intrinsic):")
    for name, sched in kinds.items():
        tasks = "".join(
            "E" if sched.next_task(c, rng) == EXTRINSIC else "I"
            for c in contexts
        )
        print(f"  {name:12s} {tasks}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--slots", type=int, default=16)
    args = ap.parse_args()
    replay_demo(args.seed)
    scheduler_demo(args.seed, args.slots)


if __name__ == "__main__":
    main()
