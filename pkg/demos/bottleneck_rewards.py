"""Show that the squared successor-distance reward concentrates at doorways.

Compares the mean one-step reward over doorway-crossing transitions with
the mean over intra-room transitions, first on the closed-form successor
features, then on a table learned online from a random walk.
"""

import argparse

import numpy as np

from sidrl.env import GridWorld, room_labels, three_rooms
from sidrl.features import OneHot, feature_rows
from sidrl.sf import SFTable, analytic_sr, td_learn_sweeps


def doorway_contrast(env, sf):
    labels = room_labels(env.spec)
    door, intra = [], []
    for i, c in enumerate(env.cells):
        for nc in env.spec.neighbors(c):
            r = sf.sfc_reward(i, env.cell_index[nc])
            if labels[c] == -1 or labels[nc] == -1:
                door.append(r)
            else:
                intra.append(r)
    return float(np.mean(door)), float(np.mean(intra))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--gamma", type=float, default=0.98)
    ap.add_argument("--updates", type=int, default=150_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    env = GridWorld(three_rooms())
    p = env.transition_matrix(env.uniform_policy())

    sf = SFTable(OneHot(env.n_states), gamma=args.gamma)
    sf.psi = analytic_sr(p, feature_rows(OneHot(env.n_states)),
                         args.gamma).psi
    door, intra = doorway_contrast(env, sf)
    print(f"closed form:  doorway {door:.4f}  intra-room {intra:.4f}  "
          f"ratio {door / intra:.2f}")

    learned = SFTable(OneHot(env.n_states), gamma=args.gamma)
    td_learn_sweeps(learned, env.transition_pairs(), args.updates,
                    seed=args.seed)
    door, intra = doorway_contrast(env, learned)
    print(f"learned ({args.updates} updates):  doorway {door:.4f}  "
          f"intra-room {intra:.4f}  ratio {door / intra:.2f}")


if __name__ == "__main__":
    main()
