"""Intrinsic-reward baselines and the reward-normalization scheme.

Two trainable novelty signals, both single-hidden-layer dense nets
(width 64, rectifier, plain SGD at 1e-3, gradients written out by
hand):

* ForwardModel: predicts the next state's features from the current
  features and the action; reward is the squared prediction error.
* DistillationPair: a trainable predictor chases a frozen random
  target network; reward is the squared gap at the queried state.

The Normalizer divides raw intrinsic rewards by a running std estimate
and tracks the mean of the normalized stream, from which the extrinsic
scale factor eta * r_mean / (1 - gamma_i) is derived.  Everything here
is learner-owned; actors never touch these objects.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np


class RunningStats:
    """Streaming count/mean/variance (Welford); population variance m2/count."""

    def __init__(self):
        self.count = 0
        self.mean = 0.0
        self.m2 = 0.0

    def push(self, x: float) -> None:
        self.count += 1
        delta = x - self.mean
        self.mean += delta / self.count
        self.m2 += delta * (x - self.mean)

    @property
    def variance(self) -> float:
        if self.count == 0:
            return 0.0
        return self.m2 / self.count

    @property
    def std(self) -> float:
        return float(np.sqrt(self.variance))


class _Dense2:
    """One-hidden-layer net with hand-written gradients, y = W2 relu(W1 x + b1) + b2."""

    def __init__(self, d_in: int, d_out: int, width: int, rng, init_scale: float | None = None):
        if init_scale is None:
            init_scale = np.sqrt(2.0 / d_in)
        self.w1 = rng.normal(0.0, init_scale, size=(width, d_in)) if init_scale else np.zeros((width, d_in))
        self.b1 = np.zeros(width)
        self.w2 = rng.normal(0.0, np.sqrt(2.0 / width), size=(d_out, width)) if init_scale else np.zeros((d_out, width))
        self.b2 = np.zeros(d_out)

    def forward(self, x: np.ndarray) -> np.ndarray:
        h = np.maximum(self.w1 @ x + self.b1, 0.0)
        return self.w2 @ h + self.b2

    def sgd_step(self, x: np.ndarray, target: np.ndarray, lr: float) -> None:
        """One step on 0.5 * ||forward(x) - target||^2."""
        h_pre = self.w1 @ x + self.b1
        h = np.maximum(h_pre, 0.0)
        err = (self.w2 @ h + self.b2) - target
        dh = (self.w2.T @ err) * (h_pre > 0.0)
        self.w2 -= lr * np.outer(err, h)
        self.b2 -= lr * err
        self.w1 -= lr * np.outer(dh, x)
        self.b1 -= lr * dh

    def params(self) -> dict[str, np.ndarray]:
        return {"w1": self.w1, "b1": self.b1, "w2": self.w2, "b2": self.b2}


class ForwardModel:
    """Squared 1-step feature-prediction error as novelty.

    Input is concat(features(s), one_hot(a)); output predicts
    features(s_next).  Pass init_scale=0 for an all-zero (inert) net.
    """

    kind = "icm"

    def __init__(self, feature_dim: int, n_actions: int, width: int = 64,
                 lr: float = 1e-3, seed: int = 0, init_scale: float | None = None):
        self.feature_dim = feature_dim
        self.n_actions = n_actions
        self.lr = lr
        self.net = _Dense2(feature_dim + n_actions, feature_dim, width,
                           np.random.default_rng(seed), init_scale)

    def _input(self, phi_s: np.ndarray, a: int) -> np.ndarray:
        x = np.zeros(self.feature_dim + self.n_actions)
        x[: self.feature_dim] = phi_s
        x[self.feature_dim + a] = 1.0
        return x

    def reward(self, phi_s: np.ndarray, a: int, phi_next: np.ndarray) -> float:
        err = self.net.forward(self._input(phi_s, a)) - phi_next
        return float(err @ err)

    def train(self, phi_s: np.ndarray, a: int, phi_next: np.ndarray) -> None:
        self.net.sgd_step(self._input(phi_s, a), phi_next, self.lr)


class DistillationPair:
    """Predictor-vs-frozen-random-target gap as novelty."""

    kind = "rnd"

    def __init__(self, feature_dim: int, out_dim: int = 16, width: int = 64,
                 lr: float = 1e-3, seed: int = 0):
        self.feature_dim = feature_dim
        self.out_dim = out_dim
        self.lr = lr
        rng = np.random.default_rng(seed)
        self.target = _Dense2(feature_dim, out_dim, width, rng)
        for arr in self.target.params().values():
            arr.setflags(write=False)
        self.predictor = _Dense2(feature_dim, out_dim, width, rng)

    def reward(self, phi_next: np.ndarray) -> float:
        err = self.predictor.forward(phi_next) - self.target.forward(phi_next)
        return float(err @ err)

    def train(self, phi_next: np.ndarray) -> None:
        self.predictor.sgd_step(phi_next, self.target.forward(phi_next), self.lr)

    def copy_target_to_predictor(self) -> None:
        src, dst = self.target.params(), self.predictor.params()
        for k in src:
            dst[k][...] = src[k]

    def target_bytes(self) -> bytes:
        return b"".join(a.tobytes() for a in self.target.params().values())


class Normalizer:
    """Running-std division for intrinsic rewards plus the extrinsic scale.

    Order per step: push raw into the std stats, divide by the updated
    std (reported as 1.0 until two samples exist, floored at 1e-8),
    then fold the normalized value into the running mean the extrinsic
    scale reads.
    """

    STD_FLOOR = 1e-8

    def __init__(self, eta: float = 3.0, gamma_i: float = 0.99):
        if not 0.0 <= gamma_i < 1.0:
            raise ValueError("gamma_i must be in [0, 1)")
        self.eta = eta
        self.gamma_i = gamma_i
        # complement taken through the decimal literal: 1 - 0.99 in raw
        # binary64 is 0.010000000000000009, which turns the 0.99 scale
        # factor into 149.99999999999986 instead of 150
        self._one_minus_gamma_i = float(1 - Fraction(str(gamma_i)))
        self.std_stats = RunningStats()
        self._norm_mean = RunningStats()
        self.floor_hits = 0

    def normalize(self, raw: float) -> float:
        self.std_stats.push(raw)
        if self.std_stats.count < 2:
            std = 1.0
        else:
            std = self.std_stats.std
            if std < self.STD_FLOOR:
                std = self.STD_FLOOR
                self.floor_hits += 1
        value = raw / std
        self._norm_mean.push(value)
        return value

    def normalize_batch(self, raw: np.ndarray) -> np.ndarray:
        """Sequential normalize over a batch, bit-identical to a loop of
        normalize() calls; the stats updates are inlined into locals to
        avoid per-element attribute and property dispatch.
        """
        ss, nm = self.std_stats, self._norm_mean
        s_count, s_mean, s_m2 = ss.count, ss.mean, ss.m2
        n_count, n_mean, n_m2 = nm.count, nm.mean, nm.m2
        floor, floor_hits, sqrt = self.STD_FLOOR, 0, math.sqrt
        out = np.empty(len(raw))
        for i, x in enumerate(raw):
            x = float(x)
            s_count += 1
            delta = x - s_mean
            s_mean += delta / s_count
            s_m2 += delta * (x - s_mean)
            if s_count < 2:
                std = 1.0
            else:
                std = sqrt(s_m2 / s_count)
                if std < floor:
                    std = floor
                    floor_hits += 1
            value = x / std
            n_count += 1
            delta = value - n_mean
            n_mean += delta / n_count
            n_m2 += delta * (value - n_mean)
            out[i] = value
        ss.count, ss.mean, ss.m2 = s_count, s_mean, s_m2
        nm.count, nm.mean, nm.m2 = n_count, n_mean, n_m2
        self.floor_hits += floor_hits
        return out

    @property
    def normalized_mean(self) -> float:
        return self._norm_mean.mean

    def extrinsic_scale(self) -> float:
        return self.eta * self._norm_mean.mean / self._one_minus_gamma_i


def build_intrinsic_model(kind: str, feature_dim: int, n_actions: int, seed: int = 0):
    """ICM/RND factory; sfc and none are handled by the agent itself."""
    if kind == "icm":
        return ForwardModel(feature_dim, n_actions, seed=seed)
    if kind == "rnd":
        return DistillationPair(feature_dim, seed=seed)
    raise ValueError(f"unknown intrinsic model kind {kind!r}")
