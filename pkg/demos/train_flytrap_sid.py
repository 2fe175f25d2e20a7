"""Train the scheduled two-head agent on the four-room flytrap grid.

The flytrap's doors sit in room corners, so a random walk rarely leaves
room 1 and a plain extrinsic learner flatlines.  The scheduled agent
spends its early slots on the intrinsic task (novelty via successor
distance), chains rooms, and converts to extrinsic behavior as value
propagates back.  The full curriculum needs a couple of million steps;
the default budget here is enough to watch rooms 2 and 3 open up.
"""

import argparse

import numpy as np

from sidrl.config import RunConfig
from sidrl.report import read_metrics
from sidrl.sid import evaluate, run_training


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--budget", type=int, default=400_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="runs/flytrap_sid")
    args = ap.parse_args()

    cfg = RunConfig(
        env="flytrap", agent="sid", budget=args.budget, seed=args.seed,
        out=args.out,
        scheduler="threshold_q", threshold_variant="heuristic_median",
        threshold=0.007, actor_epsilon_alpha=0.0,
        learner_steps_per_episode=24, q_alpha=0.25, gamma_i=0.95,
        sync_interval=200, main_capacity=15_000, high_capacity=4_000,
    )
    print(f"training sid on flytrap, {cfg.budget} env steps, "
          f"seed {cfg.seed} -> {cfg.out}")
    run_training(cfg)

    m = read_metrics(f"{cfg.out}/metrics.csv")
    n = len(m["return"])
    for frac in (0.25, 0.5, 0.75, 1.0):
        k = max(int(n * frac) - 1, 0)
        window = m["success"][max(k - 49, 0) : k + 1]
        print(f"  after {m['env_steps'][k]:>8d} steps: "
              f"success (last 50 eps) {np.mean(window):.2f}")

    stats = evaluate(f"{cfg.out}/checkpoint.npz", episodes=20, seed=123)
    print(f"greedy evaluation: success rate {stats['success_rate']:.2f}, "
          f"mean return {stats['mean_return']:.2f}, "
          f"mean steps {stats['mean_steps']:.0f}")


if __name__ == "__main__":
    main()
