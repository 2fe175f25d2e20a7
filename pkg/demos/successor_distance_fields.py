"""Print successor-distance fields for the bundled gridworlds.

The distance from a fixed anchor cell to every other cell, measured
between successor-feature rows, tracks walking distance inside a room
and jumps when the path has to cross a doorway.  This script renders
the field as an ASCII heat map and, optionally, writes the same data
as a heatmap CSV.
"""

import argparse

import numpy as np

from sidrl.env import GridWorld, THREE_ROOMS_ANCHOR, three_rooms
from sidrl.features import OneHot, feature_rows
from sidrl.report import sd_to_anchor_field, write_heatmap_csv
from sidrl.sf import analytic_sr, sd_field

SHADES = " .:-=+*#%@"


def ascii_field(env, field):
    finite = field[np.isfinite(field)]
    lo, hi = float(finite.min()), float(finite.max())
    span = hi - lo or 1.0
    lines = []
    for y in range(env.spec.height):
        row = []
        for x in range(env.spec.width):
            if (x, y) not in env.cell_index:
                row.append("#")
            else:
                v = field[env.cell_index[(x, y)]]
                row.append(SHADES[int((v - lo) / span * (len(SHADES) - 1))])
        lines.append("".join(row))
    return "\n".join(lines)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--gamma", type=float, default=0.98)
    ap.add_argument("--csv", help="also write the field as x,y,value rows")
    args = ap.parse_args()

    env = GridWorld(three_rooms())
    p = env.transition_matrix(env.uniform_policy())
    out = analytic_sr(p, feature_rows(OneHot(env.n_states)), args.gamma)
    anchor = env.cell_index[THREE_ROOMS_ANCHOR]
    field = sd_field(out.psi, anchor)

    print(f"three_rooms, anchor {THREE_ROOMS_ANCHOR}, gamma {args.gamma}")
    print(ascii_field(env, field))
    per_room = {}
    from sidrl.env import room_labels

    labels = room_labels(env.spec)
    for i, c in enumerate(env.cells):
        per_room.setdefault(labels[c], []).append(field[i])
    for room in sorted(per_room):
        name = "doorway" if room == -1 else f"room {room}"
        print(f"  mean distance {name}: {np.mean(per_room[room]):.3f}")

    if args.csv:
        grid = sd_to_anchor_field(env, out.psi, THREE_ROOMS_ANCHOR)
        write_heatmap_csv(args.csv, grid)
        print(f"wrote {args.csv}")


if __name__ == "__main__":
    main()
