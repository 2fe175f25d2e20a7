"""Two-head action-value functions, K-step double-Q targets, actor epsilons.

Both approximators carry an extrinsic head and an intrinsic head that
share nothing but their input (tabular) or a trunk of two hidden layers
(dense).  Updates name the head they train; the other head's parameters
are untouched, which is what lets a scheduled agent keep its extrinsic
policy clean of intrinsic signal.

The K-step target is the stored discounted reward sum plus, for
non-terminal tails, gamma^K times the target network's value at the
online network's argmax action (double-Q selection).  Ties in every
argmax break toward the lowest action index so runs are reproducible.
"""

from __future__ import annotations

import numpy as np

EXTRINSIC = 0
INTRINSIC = 1
HEADS = (EXTRINSIC, INTRINSIC)


def _check_head(head: int) -> None:
    if head not in HEADS:
        raise ValueError(f"unknown head {head!r}")


class TabularQ:
    """Two |S| x |A| tables with constant-step TD updates."""

    mode = "tabular"

    def __init__(self, n_states: int, n_actions: int = 4, alpha: float = 0.1,
                 gamma_e: float = 0.99, gamma_i: float = 0.99):
        self.n_states = n_states
        self.n_actions = n_actions
        self.alpha = alpha
        self.gamma = {EXTRINSIC: gamma_e, INTRINSIC: gamma_i}
        self.q = np.zeros((2, n_states, n_actions))

    def q_values(self, head: int, s: int) -> np.ndarray:
        _check_head(head)
        return self.q[head, s].copy()

    def greedy_action(self, head: int, s: int) -> int:
        _check_head(head)
        return int(np.argmax(self.q[head, s]))

    def td_update(self, head: int, s: int, a: int, target: float) -> None:
        _check_head(head)
        if not np.isfinite(target):
            raise ValueError(f"non-finite td target {target!r}")
        self.q[head, s, a] += self.alpha * (target - self.q[head, s, a])

    def td_update_batch(self, head: int, s: np.ndarray, a: np.ndarray,
                        targets: np.ndarray) -> None:
        """Batch step: each distinct (s,a) pair moves once toward the mean
        of its sampled targets.  Summing per-sample deltas instead would
        scale the learning rate by the duplicate count, which diverges on
        small state spaces where sampling with replacement repeats pairs."""
        _check_head(head)
        s = np.asarray(s, dtype=np.intp)
        a = np.asarray(a, dtype=np.intp)
        targets = np.asarray(targets, dtype=np.float64)
        if not np.all(np.isfinite(targets)):
            raise ValueError("non-finite td target in batch")
        flat = s * self.n_actions + a
        uniq, inv = np.unique(flat, return_inverse=True)
        sums = np.zeros(uniq.size)
        counts = np.zeros(uniq.size)
        np.add.at(sums, inv, targets)
        np.add.at(counts, inv, 1.0)
        us = uniq // self.n_actions
        ua = uniq % self.n_actions
        self.q[head, us, ua] += self.alpha * (sums / counts - self.q[head, us, ua])

    def copy(self) -> "TabularQ":
        out = TabularQ(self.n_states, self.n_actions, self.alpha,
                       self.gamma[EXTRINSIC], self.gamma[INTRINSIC])
        out.q = self.q.copy()
        return out

    def copy_from(self, other: "TabularQ") -> None:
        self.q[...] = other.q

    def state_dict(self) -> dict[str, np.ndarray]:
        return {"q": self.q.copy()}

    def load_state_dict(self, d) -> None:
        self.q[...] = d["q"]


class DenseQ:
    """Shared two-hidden-layer trunk (width 128, rectifier) with one linear
    head per reward stream; plain SGD, hand-written backprop.

    Operates on feature vectors, so it needs the embedding that turns a
    state id into its input.
    """

    mode = "dense"
    WIDTH = 128

    def __init__(self, embedding, n_actions: int = 4, lr: float = 1e-4,
                 gamma_e: float = 0.99, gamma_i: float = 0.99, seed: int = 0):
        self.embedding = embedding
        self.n_states = embedding.n_states
        self.n_actions = n_actions
        self.lr = lr
        self.gamma = {EXTRINSIC: gamma_e, INTRINSIC: gamma_i}
        rng = np.random.default_rng(seed)
        d_in, w = embedding.dim, self.WIDTH
        self.w1 = rng.normal(0.0, np.sqrt(2.0 / d_in), size=(w, d_in))
        self.b1 = np.zeros(w)
        self.w2 = rng.normal(0.0, np.sqrt(2.0 / w), size=(w, w))
        self.b2 = np.zeros(w)
        self.heads_w = rng.normal(0.0, np.sqrt(2.0 / w), size=(2, n_actions, w))
        self.heads_b = np.zeros((2, n_actions))

    def _trunk(self, x: np.ndarray):
        h1_pre = self.w1 @ x + self.b1
        h1 = np.maximum(h1_pre, 0.0)
        h2_pre = self.w2 @ h1 + self.b2
        h2 = np.maximum(h2_pre, 0.0)
        return h1_pre, h1, h2_pre, h2

    def q_values(self, head: int, s: int) -> np.ndarray:
        _check_head(head)
        x = self.embedding.embed(s)
        _, _, _, h2 = self._trunk(x)
        return self.heads_w[head] @ h2 + self.heads_b[head]

    def greedy_action(self, head: int, s: int) -> int:
        return int(np.argmax(self.q_values(head, s)))

    def td_update(self, head: int, s: int, a: int, target: float) -> None:
        _check_head(head)
        if not np.isfinite(target):
            raise ValueError(f"non-finite td target {target!r}")
        x = self.embedding.embed(s)
        h1_pre, h1, h2_pre, h2 = self._trunk(x)
        q_sa = self.heads_w[head, a] @ h2 + self.heads_b[head, a]
        err = q_sa - target  # gradient of 0.5 * err^2
        dh2 = self.heads_w[head, a] * err * (h2_pre > 0.0)
        dh1 = (self.w2.T @ dh2) * (h1_pre > 0.0)
        self.heads_w[head, a] -= self.lr * err * h2
        self.heads_b[head, a] -= self.lr * err
        self.w2 -= self.lr * np.outer(dh2, h1)
        self.b2 -= self.lr * dh2
        self.w1 -= self.lr * np.outer(dh1, x)
        self.b1 -= self.lr * dh1

    def td_update_batch(self, head, s, a, targets) -> None:
        for i in range(len(s)):
            self.td_update(head, int(s[i]), int(a[i]), float(targets[i]))

    def copy(self) -> "DenseQ":
        out = DenseQ.__new__(DenseQ)
        out.embedding = self.embedding
        out.n_states = self.n_states
        out.n_actions = self.n_actions
        out.lr = self.lr
        out.gamma = dict(self.gamma)
        for name in ("w1", "b1", "w2", "b2", "heads_w", "heads_b"):
            setattr(out, name, getattr(self, name).copy())
        return out

    def copy_from(self, other: "DenseQ") -> None:
        for name in ("w1", "b1", "w2", "b2", "heads_w", "heads_b"):
            getattr(self, name)[...] = getattr(other, name)

    def state_dict(self) -> dict[str, np.ndarray]:
        return {n: getattr(self, n).copy()
                for n in ("w1", "b1", "w2", "b2", "heads_w", "heads_b")}

    def load_state_dict(self, d) -> None:
        for n in ("w1", "b1", "w2", "b2", "heads_w", "heads_b"):
            getattr(self, n)[...] = d[n]


class TargetNetwork:
    """Periodically refreshed frozen copy of an online approximator."""

    def __init__(self, online, sync_interval: int = 500):
        if sync_interval <= 0:
            raise ValueError("sync_interval must be positive")
        self.net = online.copy()
        self.sync_interval = sync_interval
        self._since_sync = 0

    def tick(self, online) -> bool:
        """Count one learner step; sync and report True at the interval."""
        self._since_sync += 1
        if self._since_sync >= self.sync_interval:
            self.net.copy_from(online)
            self._since_sync = 0
            return True
        return False

    def q_values(self, head: int, s: int) -> np.ndarray:
        return self.net.q_values(head, s)


def k_step_target(online, target_net, head: int, discounted_reward_sum: float,
                  s_end: int, done: bool, k: int, gamma: float) -> float:
    """Bootstrapped K-step return with double-Q action selection."""
    _check_head(head)
    if done:
        return discounted_reward_sum
    a_star = int(np.argmax(online.q_values(head, s_end)))
    tail = target_net.q_values(head, s_end)[a_star]
    return discounted_reward_sum + gamma ** k * float(tail)


def k_step_target_batch(online_q: np.ndarray, target_q: np.ndarray,
                        rsums: np.ndarray, s_end: np.ndarray,
                        done: np.ndarray, k: int, gamma: float) -> np.ndarray:
    """Vectorized tabular form of k_step_target.

    ``online_q`` and ``target_q`` are single-head (n_states, n_actions)
    tables.  Matches the scalar function exactly, including
    lowest-index argmax ties.
    """
    a_star = np.argmax(online_q[s_end], axis=1)
    tail = target_q[s_end, a_star]
    return rsums + np.where(done, 0.0, gamma ** k * tail)


def epsilon_for_actor(i: int, n: int, epsilon_base: float = 0.4,
                      alpha: float = 7.0) -> float:
    """Per-actor exploration rate; actor 1 gets the base, later actors
    get geometrically smaller values spread over a 360-degree sweep."""
    if not 1 <= i <= n:
        raise ValueError(f"actor index {i} outside 1..{n}")
    exponent = 1.0 + ((i - 1) * (360.0 / n) / 359.0) * alpha
    return float(epsilon_base ** exponent)
