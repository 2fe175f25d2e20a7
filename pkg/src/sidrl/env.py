"""Discrete gridworld environments with terminal-reward semantics.

Cells are ``(x, y)`` pairs, ``x`` the column and ``y`` the row, with
``(0, 0)`` in the top-left corner.  Movement is 4-directional and
deterministic; moving into a wall or off the grid leaves the agent in
place.  Episodes end either by entering a terminal-reward cell or by
exhausting ``max_steps``.

Besides the environments themselves, this module holds the exact
oracles used by tests and evaluation: BFS shortest paths, closed-form
transition matrices under a given policy, and room labelling derived
from the doorway metadata.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field

import numpy as np

UP, DOWN, LEFT, RIGHT = 0, 1, 2, 3
ACTIONS = (UP, DOWN, LEFT, RIGHT)
ACTION_VECTORS = ((0, -1), (0, 1), (-1, 0), (1, 0))
ACTION_NAMES = ("up", "down", "left", "right")

Cell = tuple[int, int]


class EpisodeOver(RuntimeError):
    """Raised when ``step`` is called on a finished episode."""


@dataclass(frozen=True)
class GridSpec:
    """Static description of a gridworld.

    ``doorways`` is oracle metadata only: removing it never changes the
    dynamics.  ``step_rewards`` cells ("apples") pay out once per
    episode; ``terminal_rewards`` cells end the episode.
    """

    width: int
    height: int
    walls: frozenset[Cell] = frozenset()
    starts: tuple[Cell, ...] = ((0, 0),)
    terminal_rewards: dict[Cell, float] = field(default_factory=dict)
    step_rewards: dict[Cell, float] = field(default_factory=dict)
    max_steps: int = 500
    doorways: frozenset[Cell] = frozenset()
    name: str = "custom"

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValueError("grid dimensions must be positive")
        if self.max_steps <= 0:
            raise ValueError("max_steps must be positive")
        if not self.starts:
            raise ValueError("at least one start cell required")
        for cell in self.starts:
            if cell in self.walls:
                raise ValueError(f"start cell {cell} is a wall")
            if not self.in_bounds(cell):
                raise ValueError(f"start cell {cell} out of bounds")
        overlap = set(self.terminal_rewards) & set(self.step_rewards)
        if overlap:
            raise ValueError(f"cells {overlap} are both terminal and step rewards")
        for cell in list(self.terminal_rewards) + list(self.step_rewards):
            if cell in self.walls or not self.in_bounds(cell):
                raise ValueError(f"reward cell {cell} is a wall or out of bounds")
        self._check_reachability()

    def in_bounds(self, cell: Cell) -> bool:
        x, y = cell
        return 0 <= x < self.width and 0 <= y < self.height

    def open_cells(self) -> list[Cell]:
        """Non-wall cells in row-major order (the state enumeration)."""
        return [
            (x, y)
            for y in range(self.height)
            for x in range(self.width)
            if (x, y) not in self.walls
        ]

    def neighbors(self, cell: Cell) -> list[Cell]:
        out = []
        for dx, dy in ACTION_VECTORS:
            nxt = (cell[0] + dx, cell[1] + dy)
            if self.in_bounds(nxt) and nxt not in self.walls:
                out.append(nxt)
        return out

    def _check_reachability(self) -> None:
        reward_cells = set(self.terminal_rewards) | set(self.step_rewards)
        if not reward_cells:
            return
        for start in self.starts:
            reached = _bfs_distances(self, start)
            missing = [c for c in reward_cells if c not in reached]
            if missing:
                raise ValueError(f"reward cells {missing} unreachable from {start}")


@dataclass
class EnvState:
    agent_cell: Cell
    steps_elapsed: int = 0
    collected: frozenset[Cell] = frozenset()


@dataclass(frozen=True)
class Observation:
    """Tabular state index, optionally decorated with an embedding vector."""

    state_id: int
    feature_vector: np.ndarray | None = None


def _bfs_distances(spec: GridSpec, source: Cell) -> dict[Cell, int]:
    dist = {source: 0}
    frontier = deque([source])
    while frontier:
        cell = frontier.popleft()
        for nxt in spec.neighbors(cell):
            if nxt not in dist:
                dist[nxt] = dist[cell] + 1
                frontier.append(nxt)
    return dist


class GridWorld:
    """A single-owner, seedable gridworld instance.

    Tabular state ids enumerate ``open cells x number-of-apples-collected``;
    which apples were taken is deliberately abstracted to the count so the
    state space stays small while the once-per-episode payout dynamic is
    preserved.  With no step rewards, state ids coincide with cell indices.
    """

    def __init__(self, spec: GridSpec, seed: int = 0, embedding=None):
        self.spec = spec
        self.embedding = embedding
        self._rng = random.Random(seed)
        self.cells = spec.open_cells()
        self.cell_index = {c: i for i, c in enumerate(self.cells)}
        self.n_cells = len(self.cells)
        self.n_apples = len(spec.step_rewards)
        self.n_states = self.n_cells * (self.n_apples + 1)
        self.n_actions = len(ACTIONS)

        # Flat lookup tables keep the step() hot path in plain Python ints.
        self._next_cell = [[0] * self.n_actions for _ in range(self.n_cells)]
        for i, cell in enumerate(self.cells):
            for a, (dx, dy) in enumerate(ACTION_VECTORS):
                nxt = (cell[0] + dx, cell[1] + dy)
                if not spec.in_bounds(nxt) or nxt in spec.walls:
                    nxt = cell
                self._next_cell[i][a] = self.cell_index[nxt]
        self._terminal_reward = [spec.terminal_rewards.get(c) for c in self.cells]
        self._apple_reward = [spec.step_rewards.get(c) for c in self.cells]
        self._start_indices = [self.cell_index[c] for c in spec.starts]

        self._agent = self._start_indices[0]
        self._steps = 0
        self._collected: set[int] = set()
        self._done = True
        self._terminated = False

    # -- episode control ------------------------------------------------

    def reset(self) -> Observation:
        self._agent = self._rng.choice(self._start_indices)
        self._steps = 0
        self._collected.clear()
        self._done = False
        self._terminated = False
        return self._observe()

    def step(self, action: int) -> tuple[Observation, float, bool]:
        if self._done:
            raise EpisodeOver("episode finished; call reset() before step()")
        if action not in ACTIONS:
            raise ValueError(f"unknown action {action!r}")
        nxt = self._next_cell[self._agent][action]
        self._agent = nxt
        self._steps += 1
        reward = 0.0
        apple = self._apple_reward[nxt]
        if apple is not None and nxt not in self._collected:
            self._collected.add(nxt)
            reward += apple
        terminal = self._terminal_reward[nxt]
        if terminal is not None:
            reward += terminal
            self._done = True
            self._terminated = True
        if self._steps >= self.spec.max_steps:
            self._done = True
        return self._observe(), reward, self._done

    @property
    def done(self) -> bool:
        return self._done

    @property
    def terminated(self) -> bool:
        """True when the episode ended by reaching a terminal cell."""
        return self._terminated

    @property
    def state(self) -> EnvState:
        return EnvState(
            agent_cell=self.cells[self._agent],
            steps_elapsed=self._steps,
            collected=frozenset(self.cells[i] for i in self._collected),
        )

    def _observe(self) -> Observation:
        sid = self.state_id(self._agent, len(self._collected))
        if self.embedding is None:
            return Observation(sid)
        return Observation(sid, self.embedding.embed(sid))

    # -- state enumeration ----------------------------------------------

    def state_id(self, cell_idx: int, collected_count: int = 0) -> int:
        return cell_idx * (self.n_apples + 1) + collected_count

    def cell_of_state(self, state_id: int) -> Cell:
        return self.cells[state_id // (self.n_apples + 1)]

    def cell_state_ids(self, collected_count: int = 0) -> list[int]:
        """State ids of every open cell at a fixed collected count."""
        return [self.state_id(i, collected_count) for i in range(self.n_cells)]

    # -- oracles ---------------------------------------------------------

    def uniform_policy(self) -> np.ndarray:
        return np.full((self.n_cells, self.n_actions), 1.0 / self.n_actions)

    def transition_matrix(self, policy: np.ndarray) -> np.ndarray:
        """Cell-to-cell transition matrix under a per-cell action distribution.

        Step-reward (apple) bookkeeping is ignored; terminal cells are
        absorbing.  ``policy`` has shape (n_cells, n_actions) with rows
        summing to 1.
        """
        policy = np.asarray(policy, dtype=float)
        if policy.shape != (self.n_cells, self.n_actions):
            raise ValueError(
                f"policy shape {policy.shape} != {(self.n_cells, self.n_actions)}"
            )
        if not np.allclose(policy.sum(axis=1), 1.0, atol=1e-9):
            raise ValueError("policy rows must sum to 1")
        p = np.zeros((self.n_cells, self.n_cells))
        for i in range(self.n_cells):
            if self._terminal_reward[i] is not None:
                p[i, i] = 1.0
                continue
            for a in ACTIONS:
                p[i, self._next_cell[i][a]] += policy[i, a]
        return p

    def transition_pairs(self, actions: tuple[int, ...] = ACTIONS) -> list[tuple[int, int]]:
        """All (cell, next_cell) pairs reachable in one move, one entry per
        action in ``actions``; terminal cells are skipped.  A shuffled pass
        over this list visits transitions with the frequency of the uniform
        policy over ``actions``."""
        pairs = []
        for i in range(self.n_cells):
            if self._terminal_reward[i] is not None:
                continue
            for a in actions:
                pairs.append((i, self._next_cell[i][a]))
        return pairs

    def shortest_path_distance(self, source: Cell, target: Cell) -> int | None:
        """BFS step distance between two open cells; None when unreachable."""
        for cell in (source, target):
            if cell in self.spec.walls or not self.spec.in_bounds(cell):
                raise ValueError(f"{cell} is a wall or out of bounds")
        dist = _bfs_distances(self.spec, source)
        return dist.get(target)


def room_labels(spec: GridSpec) -> dict[Cell, int]:
    """Connected components of open cells once doorway cells are removed.

    Doorway cells themselves get label -1.  Pure metadata, used by the
    bottleneck tests and heatmap evaluation.
    """
    labels: dict[Cell, int] = {c: -1 for c in spec.doorways}
    next_label = 0
    for cell in spec.open_cells():
        if cell in labels:
            continue
        frontier = deque([cell])
        labels[cell] = next_label
        while frontier:
            cur = frontier.popleft()
            for nxt in spec.neighbors(cur):
                if nxt not in labels and nxt not in spec.doorways:
                    labels[nxt] = next_label
                    frontier.append(nxt)
        next_label += 1
    return labels


# -- canonical layouts ----------------------------------------------------


def three_rooms() -> GridSpec:
    """Three 5x11 rooms in a row, one mid-height doorway per dividing wall.

    No rewards: this layout exists for successor-feature analysis, with
    the anchor for distance fields at the center of the left room.
    """
    width, height = 17, 11
    mid = height // 2
    walls = set()
    doors = set()
    for wx in (5, 11):
        for y in range(height):
            if y == mid:
                doors.add((wx, y))
            else:
                walls.add((wx, y))
    return GridSpec(
        width=width,
        height=height,
        walls=frozenset(walls),
        starts=((2, mid),),
        max_steps=500,
        doorways=frozenset(doors),
        name="three_rooms",
    )


THREE_ROOMS_ANCHOR: Cell = (2, 5)


def flytrap() -> GridSpec:
    """Four 9x9 rooms in sequence, every connecting door in a bottom corner.

    A random walk almost never strings the four corner doors together
    within one episode; the +1 terminal sits one cell beyond the last
    room's door.
    """
    height = 9
    width = 41
    walls = set()
    doors = set()
    door_y = height - 1
    for wx in (9, 19, 29, 39):
        for y in range(height):
            if y == door_y:
                doors.add((wx, y))
            else:
                walls.add((wx, y))
    goal = (40, door_y)
    for y in range(height):
        if (40, y) != goal:
            walls.add((40, y))
    return GridSpec(
        width=width,
        height=height,
        walls=frozenset(walls),
        starts=((4, 4),),
        terminal_rewards={goal: 1.0},
        max_steps=500,
        doorways=frozenset(doors),
        name="flytrap",
    )


def distraction() -> GridSpec:
    """Central junction with 4 nearby apples left and a +1 terminal far right.

    Both corridors consist of three 5x3 sections behind one-cell doors;
    the apples (0.05 each) sit in the first left section, the terminal at
    the far end of the right corridor.
    """
    height = 3
    width = 39
    mid = 1
    walls = set()
    doors = set()
    for wx in (5, 11, 17, 21, 27, 33):
        for y in range(height):
            if y == mid:
                doors.add((wx, y))
            else:
                walls.add((wx, y))
    apples = {(x, mid): 0.05 for x in (13, 14, 15, 16)}
    return GridSpec(
        width=width,
        height=height,
        walls=frozenset(walls),
        starts=((19, mid),),
        terminal_rewards={(38, mid): 1.0},
        step_rewards=apples,
        max_steps=300,
        doorways=frozenset(doors),
        name="distraction",
    )


def chain(n: int) -> GridSpec:
    """A 1-row corridor of n cells with no rewards (random-walk analysis)."""
    if n < 2:
        raise ValueError("chain needs at least 2 cells")
    return GridSpec(width=n, height=1, starts=((0, 0),), max_steps=100, name=f"chain:{n}")


_CHAR_MAP = {"#", ".", "S", "G", "a"}


def parse_map(text: str, max_steps: int = 500, name: str = "custom") -> GridSpec:
    """Parse the plain-text map format: '#' wall, '.' floor, 'S' start,
    'G' terminal(+1), 'a' apple(+0.05), one row per line."""
    rows = [line for line in text.splitlines() if line.strip()]
    if not rows:
        raise ValueError("empty map")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError("map rows have unequal lengths")
    walls, starts, terminals, apples = set(), [], {}, {}
    for y, row in enumerate(rows):
        for x, ch in enumerate(row):
            if ch not in _CHAR_MAP:
                raise ValueError(f"unknown map character {ch!r} at {(x, y)}")
            if ch == "#":
                walls.add((x, y))
            elif ch == "S":
                starts.append((x, y))
            elif ch == "G":
                terminals[(x, y)] = 1.0
            elif ch == "a":
                apples[(x, y)] = 0.05
    if not starts:
        raise ValueError("map has no start cell")
    return GridSpec(
        width=width,
        height=len(rows),
        walls=frozenset(walls),
        starts=tuple(starts),
        terminal_rewards=terminals,
        step_rewards=apples,
        max_steps=max_steps,
        name=name,
    )


def load_map(path: str, max_steps: int = 500) -> GridSpec:
    with open(path) as fh:
        return parse_map(fh.read(), max_steps=max_steps, name=path)


_REGISTRY = {
    "three_rooms": three_rooms,
    "flytrap": flytrap,
    "distraction": distraction,
}


def spec_by_name(name: str) -> GridSpec:
    """Resolve an environment name: registry entry, "chain:<n>", or map path."""
    if name in _REGISTRY:
        return _REGISTRY[name]()
    if name.startswith("chain:"):
        return chain(int(name.split(":", 1)[1]))
    import os

    if os.path.exists(name):
        return load_map(name)
    raise ValueError(f"unknown environment {name!r}")


def make_env(name: str, seed: int = 0, embedding=None) -> GridWorld:
    return GridWorld(spec_by_name(name), seed=seed, embedding=embedding)
