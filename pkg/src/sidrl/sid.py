"""Scheduled-intrinsic-drive agents: schedulers, actors, learner, training.

Three agent kinds share the machinery:

* ``m``      one extrinsic head, no intrinsic signal;
* ``bonus``  one extrinsic head trained on scaled extrinsic reward plus
             the normalized intrinsic reward;
* ``sid``    two heads; a per-actor scheduler picks which head drives
             behavior for each slot of an episode, and both heads train
             from the shared replay stream.

Actors act epsilon-greedily on immutable parameter snapshots, maintain a
K-step reward window, and push one transition per environment step into
the shared two-tier replay buffer (gated by the actor-side extrinsic TD
error).  The learner samples 96+32 batches, computes intrinsic rewards
at learn time from the current models, normalizes them, and trains the
heads with K-step double-Q targets.

Deterministic mode interleaves the actors round-robin, one episode each,
with a fixed number of learner steps after every episode; given one
seed, two runs produce byte-identical metrics.  Concurrent mode runs
each actor and the learner on threads against the same interfaces.
"""

from __future__ import annotations

import math
import os
import threading
from dataclasses import dataclass, field
from random import Random

import numpy as np

from .config import RunConfig, make_manifest
from .env import GridWorld, make_env, spec_by_name
from .features import make_embedding
from .intrinsic import Normalizer, RunningStats, build_intrinsic_model
from .qlearn import (
    EXTRINSIC,
    INTRINSIC,
    DenseQ,
    TabularQ,
    TargetNetwork,
    epsilon_for_actor,
    k_step_target,
    k_step_target_batch,
)
from .replay import Transition, TwoTierBuffer
from .sf import SFTable

TASK_NAMES = {EXTRINSIC: "E", INTRINSIC: "I"}


# -- schedulers ------------------------------------------------------------


@dataclass
class SlotContext:
    """What a scheduler may look at when a slot begins."""

    slot_index: int
    state: int
    q_extrinsic_value_at_state: float
    running_q_mean: float


class RandomScheduler:
    kind = "random"

    def next_task(self, ctx: SlotContext, rng: Random) -> int:
        return EXTRINSIC if rng.random() < 0.5 else INTRINSIC


class SwitchingScheduler:
    kind = "switching"

    def next_task(self, ctx: SlotContext, rng: Random) -> int:
        return EXTRINSIC if ctx.slot_index % 2 == 0 else INTRINSIC


class ThresholdQScheduler:
    """Intrinsic when the extrinsic value at the current state sits below
    a threshold: either the running mean of previously seen values, or a
    fixed heuristic level."""

    kind = "threshold_q"

    def __init__(self, variant: str = "running_mean", threshold: float = 0.007):
        if variant not in ("running_mean", "heuristic_median"):
            raise ValueError(f"unknown threshold variant {variant!r}")
        self.variant = variant
        self.threshold = threshold

    def next_task(self, ctx: SlotContext, rng: Random) -> int:
        level = ctx.running_q_mean if self.variant == "running_mean" else self.threshold
        return INTRINSIC if ctx.q_extrinsic_value_at_state < level else EXTRINSIC


class MacroQScheduler:
    """Epsilon-greedy over a standalone macro table Q(state, task), trained
    on slot-granular transitions with discount gamma^m for an m-step slot."""

    kind = "macro_q"

    def __init__(self, n_states: int, epsilon: float = 0.1, alpha: float = 0.1,
                 gamma: float = 0.99):
        self.macro_q = np.zeros((n_states, 2))
        self.epsilon = epsilon
        self.alpha = alpha
        self.gamma = gamma

    def next_task(self, ctx: SlotContext, rng: Random) -> int:
        if rng.random() < self.epsilon:
            return EXTRINSIC if rng.random() < 0.5 else INTRINSIC
        return int(np.argmax(self.macro_q[ctx.state]))

    def update(self, s_from: int, s_to: int, task: int, discounted_return: float,
               m: int, done: bool = False) -> None:
        tail = 0.0 if done else self.gamma**m * float(np.max(self.macro_q[s_to]))
        target = discounted_return + tail
        self.macro_q[s_from, task] += self.alpha * (target - self.macro_q[s_from, task])


def macro_q_update(scheduler, s_from: int, s_to: int, task: int,
                   discounted_return: float, m: int, done: bool = False) -> None:
    if not isinstance(scheduler, MacroQScheduler):
        raise ValueError("macro_q_update applies only to macro_q schedulers")
    scheduler.update(s_from, s_to, task, discounted_return, m, done)


def make_scheduler(cfg: RunConfig, n_states: int):
    kind = cfg.resolved_scheduler
    if kind == "random":
        return RandomScheduler()
    if kind == "switching":
        return SwitchingScheduler()
    if kind == "threshold_q":
        return ThresholdQScheduler(cfg.threshold_variant, cfg.threshold)
    if kind == "macro_q":
        return MacroQScheduler(n_states, cfg.macro_epsilon, cfg.macro_alpha, cfg.gamma_e)
    raise ValueError(f"unknown scheduler kind {kind!r}")


# -- parameter snapshots ----------------------------------------------------


class Snapshot:
    """Plain-list view of the online Q used on the actor hot path."""

    __slots__ = ("q_e", "greedy", "qmax_e")

    def __init__(self, approx):
        if isinstance(approx, TabularQ):
            qe, qi = approx.q[EXTRINSIC], approx.q[INTRINSIC]
        else:
            qe = np.stack([approx.q_values(EXTRINSIC, s) for s in range(approx.n_states)])
            qi = np.stack([approx.q_values(INTRINSIC, s) for s in range(approx.n_states)])
        self.q_e = qe.tolist()
        self.greedy = (
            np.argmax(qe, axis=1).tolist(),
            np.argmax(qi, axis=1).tolist(),
        )
        self.qmax_e = qe.max(axis=1).tolist()


# -- actor -------------------------------------------------------------------


@dataclass
class EpisodeStats:
    episode: int
    steps: int
    extrinsic_return: float
    task_steps: dict[int, int]
    success: bool
    task_sequence: str


class Actor:
    """Owns one environment and plays whole episodes against a snapshot."""

    def __init__(self, actor_id: int, env: GridWorld, cfg: RunConfig,
                 scheduler, epsilon: float, action_seed: int):
        self.actor_id = actor_id
        self.env = env
        self.cfg = cfg
        self.scheduler = scheduler
        self.epsilon = epsilon
        self.rng = Random(action_seed)
        self.k = cfg.k
        self.gamma_e = cfg.gamma_e
        self.slot_len = math.ceil(env.spec.max_steps / cfg.slots)
        self.is_sid = cfg.agent == "sid"
        self.q_mean_stats = RunningStats()
        self.snapshot: Snapshot | None = None

    def run_episode(self, buffer: TwoTierBuffer, episode_id: int) -> EpisodeStats:
        env = self.env
        snap = self.snapshot
        q_e, qmax_e = snap.q_e, snap.qmax_e
        greedy = snap.greedy
        rng = self.rng
        eps = self.epsilon
        k = self.k
        gamma_e = self.gamma_e
        gpow_k = gamma_e**k

        obs = env.reset()
        s = obs.state_id
        task = EXTRINSIC
        task_steps = {EXTRINSIC: 0, INTRINSIC: 0}
        sequence = []
        # pending K-step windows: [s, a, rsum, discount, step_index,
        # pair_s_next, pair_reward]
        pending: list[list] = []
        ext_return = 0.0
        slot_start_state = s
        slot_start_step = 0
        slot_return = 0.0
        slot_gamma = 1.0
        steps = 0

        while True:
            if self.is_sid and steps % self.slot_len == 0:
                if steps > 0 and isinstance(self.scheduler, MacroQScheduler):
                    self.scheduler.update(slot_start_state, s, task,
                                          slot_return, steps - slot_start_step)
                ctx = SlotContext(
                    slot_index=steps // self.slot_len,
                    state=s,
                    q_extrinsic_value_at_state=qmax_e[s],
                    running_q_mean=self.q_mean_stats.mean,
                )
                task = self.scheduler.next_task(ctx, rng)
                self.q_mean_stats.push(qmax_e[s])
                sequence.append(TASK_NAMES[task])
                slot_start_state = s
                slot_start_step = steps
                slot_return = 0.0
                slot_gamma = 1.0

            if rng.random() < eps:
                a = rng.randrange(4)
            else:
                a = greedy[task][s]

            obs, r, episode_done = env.step(a)
            s_next = obs.state_id
            steps += 1
            ext_return += r
            task_steps[task] += 1
            slot_return += slot_gamma * r
            slot_gamma *= gamma_e

            for p in pending:
                p[2] += p[3] * r
                p[3] *= gamma_e
            pending.append([s, a, r, gamma_e, steps - 1, s_next, r])

            if len(pending) == k or episode_done:
                emit = pending if episode_done else (pending.pop(0),)
                for p in emit:
                    rsum = p[2]
                    if episode_done:
                        target = rsum
                    else:
                        target = rsum + gpow_k * qmax_e[s_next]
                    buffer.push(
                        Transition(
                            s_start=p[0],
                            a_start=p[1],
                            discounted_reward_sum=rsum,
                            s_end=s_next,
                            done=episode_done,
                            pair_s=p[0],
                            pair_s_next=p[5],
                            pair_reward=p[6],
                            episode_id=episode_id,
                            step_index=p[4],
                        ),
                        abs(target - q_e[p[0]][p[1]]),
                    )
                if episode_done:
                    pending.clear()

            s = s_next
            if episode_done:
                break

        if self.is_sid and isinstance(self.scheduler, MacroQScheduler):
            self.scheduler.update(slot_start_state, s, task, slot_return,
                                  steps - slot_start_step, done=True)

        return EpisodeStats(
            episode=episode_id,
            steps=steps,
            extrinsic_return=ext_return,
            task_steps=task_steps,
            success=env.terminated,
            task_sequence="".join(sequence),
        )


# -- learner -------------------------------------------------------------


@dataclass
class LearnerDiag:
    raw_intrinsic_mean: float = 0.0
    normalized_intrinsic_mean: float = 0.0
    extrinsic_scale: float = 0.0


class Learner:
    """Samples batches and trains heads, SF table, and intrinsic models.

    Intrinsic rewards are computed here, from the models as they are at
    sample time, never stored in the buffer: the signal is
    non-stationary and must reflect current parameters.
    """

    def __init__(self, cfg: RunConfig, approx, target_net: TargetNetwork,
                 buffer: TwoTierBuffer, embedding, sf: SFTable | None,
                 intrinsic_model, normalizer: Normalizer | None,
                 sample_seed: int):
        self.cfg = cfg
        self.approx = approx
        self.target_net = target_net
        self.buffer = buffer
        self.embedding = embedding
        self.sf = sf
        self.intrinsic_model = intrinsic_model
        self.normalizer = normalizer
        self.rng = np.random.default_rng(sample_seed)
        self.steps_done = 0
        self.diag = LearnerDiag()
        self._split = (cfg.batch - cfg.high_share, cfg.high_share)

    def _raw_intrinsic(self, batch, s_start, s_end) -> np.ndarray | None:
        kind = self.cfg.intrinsic_kind
        if kind == "none":
            return None
        if kind == "sfc":
            return self.sf.sfc_reward_batch(s_start, s_end)
        if kind == "icm":
            emb = self.embedding
            return np.array([
                self.intrinsic_model.reward(emb.embed(t.pair_s), t.a_start,
                                            emb.embed(t.pair_s_next))
                for t in batch
            ])
        if kind == "rnd":
            emb = self.embedding
            return np.array([
                self.intrinsic_model.reward(emb.embed(t.pair_s_next)) for t in batch
            ])
        raise ValueError(f"unknown intrinsic kind {kind!r}")

    def step(self) -> LearnerDiag:
        cfg = self.cfg
        batch = self.buffer.sample(self.rng, cfg.batch, self._split)
        n = len(batch)
        s_start = np.fromiter((t.s_start for t in batch), dtype=np.int64, count=n)
        a_start = np.fromiter((t.a_start for t in batch), dtype=np.int64, count=n)
        rsum = np.fromiter((t.discounted_reward_sum for t in batch), dtype=np.float64, count=n)
        s_end = np.fromiter((t.s_end for t in batch), dtype=np.int64, count=n)
        done = np.fromiter((t.done for t in batch), dtype=np.bool_, count=n)
        pair_s = np.fromiter((t.pair_s for t in batch), dtype=np.int64, count=n)
        pair_next = np.fromiter((t.pair_s_next for t in batch), dtype=np.int64, count=n)

        raw = self._raw_intrinsic(batch, s_start, s_end)
        if raw is None:
            normalized = None
            scale = 0.0
        else:
            normalized = self.normalizer.normalize_batch(raw)
            normalized *= cfg.intrinsic_scale
            scale = self.normalizer.extrinsic_scale()
        ext_mult = scale if scale > 0.0 else 1.0

        rewards_e = ext_mult * rsum
        if cfg.agent == "bonus":
            rewards_e = rewards_e + normalized

        if isinstance(self.approx, TabularQ):
            targets_e = k_step_target_batch(
                self.approx.q[EXTRINSIC], self.target_net.net.q[EXTRINSIC],
                rewards_e, s_end, done, cfg.k, cfg.gamma_e)
            self.approx.td_update_batch(EXTRINSIC, s_start, a_start, targets_e)
            if cfg.agent == "sid":
                targets_i = k_step_target_batch(
                    self.approx.q[INTRINSIC], self.target_net.net.q[INTRINSIC],
                    normalized, s_end, done, cfg.k, cfg.gamma_i)
                self.approx.td_update_batch(INTRINSIC, s_start, a_start, targets_i)
        else:
            for i in range(n):
                tgt = k_step_target(self.approx, self.target_net, EXTRINSIC,
                                    float(rewards_e[i]), int(s_end[i]),
                                    bool(done[i]), cfg.k, cfg.gamma_e)
                self.approx.td_update(EXTRINSIC, int(s_start[i]), int(a_start[i]), tgt)
            if cfg.agent == "sid":
                for i in range(n):
                    tgt = k_step_target(self.approx, self.target_net, INTRINSIC,
                                        float(normalized[i]), int(s_end[i]),
                                        bool(done[i]), cfg.k, cfg.gamma_i)
                    self.approx.td_update(INTRINSIC, int(s_start[i]), int(a_start[i]), tgt)

        if self.sf is not None:
            self.sf.td_update_batch(pair_s, pair_next)
        if cfg.intrinsic_kind == "icm":
            emb = self.embedding
            for t in batch:
                self.intrinsic_model.train(emb.embed(t.pair_s), t.a_start,
                                           emb.embed(t.pair_s_next))
        elif cfg.intrinsic_kind == "rnd":
            emb = self.embedding
            for t in batch:
                self.intrinsic_model.train(emb.embed(t.pair_s_next))

        self.target_net.tick(self.approx)
        self.steps_done += 1
        if raw is not None:
            self.diag = LearnerDiag(float(raw.mean()), float(normalized.mean()), scale)
        return self.diag


# -- training ----------------------------------------------------------------


@dataclass
class RunResult:
    out_dir: str
    metrics_path: str
    checkpoint_path: str
    manifest_path: str
    episodes: list[EpisodeStats] = field(default_factory=list)
    env_steps: int = 0


def _seed_ints(master: int, count: int) -> list[int]:
    ss = np.random.SeedSequence(master)
    return [int(x) for x in ss.generate_state(count, dtype=np.uint32)]


def build_components(cfg: RunConfig):
    """Construct envs, approximator, buffers, actors, and learner."""
    cfg.validate()
    spec = spec_by_name(cfg.env)
    seeds = _seed_ints(cfg.seed, 2 * cfg.actors + 3)
    envs = [GridWorld(spec, seed=seeds[i]) for i in range(cfg.actors)]
    n_states = envs[0].n_states
    embedding = make_embedding(cfg.embedding_kind, n_states,
                               dim=cfg.embedding_dim, seed=cfg.embedding_seed)
    if cfg.q_mode == "tabular":
        approx = TabularQ(n_states, envs[0].n_actions, alpha=cfg.q_alpha,
                          gamma_e=cfg.gamma_e, gamma_i=cfg.gamma_i)
    else:
        approx = DenseQ(embedding, envs[0].n_actions, lr=cfg.q_lr,
                        gamma_e=cfg.gamma_e, gamma_i=cfg.gamma_i,
                        seed=seeds[2 * cfg.actors])
    target_net = TargetNetwork(approx, cfg.sync_interval)
    buffer = TwoTierBuffer(cfg.main_capacity, cfg.high_capacity)

    sf = None
    intrinsic_model = None
    normalizer = None
    if cfg.intrinsic_kind != "none":
        normalizer = Normalizer(eta=cfg.eta, gamma_i=cfg.gamma_i_norm)
        if cfg.intrinsic_kind == "sfc":
            sf = SFTable(embedding, gamma=cfg.sf_gamma, alpha=cfg.sf_alpha,
                         convention=cfg.sf_convention)
        else:
            intrinsic_model = build_intrinsic_model(
                cfg.intrinsic_kind, embedding.dim, envs[0].n_actions,
                seed=seeds[2 * cfg.actors + 1])

    actors = []
    for i in range(cfg.actors):
        scheduler = make_scheduler(cfg, n_states) if cfg.agent == "sid" else None
        actors.append(Actor(
            actor_id=i,
            env=envs[i],
            cfg=cfg,
            scheduler=scheduler,
            epsilon=epsilon_for_actor(i + 1, cfg.actors,
                                      cfg.actor_epsilon_base,
                                      cfg.actor_epsilon_alpha),
            action_seed=seeds[cfg.actors + i],
        ))
    learner = Learner(cfg, approx, target_net, buffer, embedding, sf,
                      intrinsic_model, normalizer,
                      sample_seed=seeds[2 * cfg.actors + 2])
    return envs, embedding, approx, target_net, buffer, actors, learner


def _metrics_row(stats: EpisodeStats, env_steps: int) -> str:
    return (
        f"{stats.episode},{env_steps},{stats.extrinsic_return:.10g},"
        f"{stats.task_steps[EXTRINSIC]},{stats.task_steps[INTRINSIC]},"
        f"{int(stats.success)}\n"
    )


METRICS_HEADER = "episode,env_steps,return,task_E_steps,task_I_steps,success\n"


def run_training(cfg: RunConfig) -> RunResult:
    envs, embedding, approx, target_net, buffer, actors, learner = build_components(cfg)
    os.makedirs(cfg.out, exist_ok=True)
    metrics_path = os.path.join(cfg.out, "metrics.csv")
    checkpoint_path = os.path.join(cfg.out, "checkpoint.npz")
    manifest_path = os.path.join(cfg.out, "manifest.json")
    intrinsic_path = os.path.join(cfg.out, "intrinsic.csv")
    tasks_path = os.path.join(cfg.out, "task_sequences.txt")

    result = RunResult(cfg.out, metrics_path, checkpoint_path, manifest_path)
    if cfg.deterministic:
        _train_deterministic(cfg, buffer, actors, learner, approx, result)
    else:
        _train_concurrent(cfg, buffer, actors, learner, approx, result)

    with open(metrics_path, "w") as fh:
        fh.write(f"# env={cfg.env} agent={cfg.agent}\n")
        fh.write(METRICS_HEADER)
        steps_cum = 0
        for st in result.episodes:
            steps_cum += st.steps
            fh.write(_metrics_row(st, steps_cum))
    if cfg.agent == "sid":
        with open(tasks_path, "w") as fh:
            for st in result.episodes:
                fh.write(f"{st.episode} {st.task_sequence}\n")
    if learner.normalizer is not None:
        with open(intrinsic_path, "w") as fh:
            fh.write("learner_steps,raw_intrinsic_mean,normalized_intrinsic_mean,extrinsic_scale\n")
            d = learner.diag
            fh.write(f"{learner.steps_done},{d.raw_intrinsic_mean:.10g},"
                     f"{d.normalized_intrinsic_mean:.10g},{d.extrinsic_scale:.10g}\n")
    save_checkpoint(checkpoint_path, cfg, approx, learner.sf)
    make_manifest(cfg, [cfg.seed], {
        "metrics": metrics_path,
        "checkpoint": checkpoint_path,
    }).write(manifest_path)
    return result


def _train_deterministic(cfg, buffer, actors, learner, approx, result) -> None:
    env_steps = 0
    episode_id = 0
    while env_steps < cfg.budget:
        for actor in actors:
            if env_steps >= cfg.budget:
                break
            actor.snapshot = Snapshot(approx)
            stats = actor.run_episode(buffer, episode_id)
            episode_id += 1
            env_steps += stats.steps
            result.episodes.append(stats)
            for _ in range(cfg.learner_steps_per_episode):
                learner.step()
    result.env_steps = env_steps


def _train_concurrent(cfg, buffer, actors, learner, approx, result) -> None:
    """N actor threads against one learner thread; metrics order follows
    episode completion and is not reproducible across runs."""
    lock = threading.Lock()
    counters = {"env_steps": 0, "episode_id": 0}
    stop = threading.Event()

    def actor_loop(actor: Actor) -> None:
        while not stop.is_set():
            with lock:
                if counters["env_steps"] >= cfg.budget:
                    stop.set()
                    break
                actor.snapshot = Snapshot(approx)
                episode_id = counters["episode_id"]
                counters["episode_id"] += 1
            stats = actor.run_episode(buffer, episode_id)
            with lock:
                counters["env_steps"] += stats.steps
                result.episodes.append(stats)

    def learner_loop() -> None:
        while not stop.is_set():
            with lock:
                if len(buffer) == 0:
                    continue
                learner.step()

    threads = [threading.Thread(target=actor_loop, args=(a,)) for a in actors]
    lthread = threading.Thread(target=learner_loop)
    for t in threads:
        t.start()
    lthread.start()
    for t in threads:
        t.join()
    stop.set()
    lthread.join()
    result.env_steps = counters["env_steps"]


# -- checkpoints ---------------------------------------------------------


CHECKPOINT_VERSION = "sidrl-ckpt-1"


def save_checkpoint(path: str, cfg: RunConfig, approx, sf: SFTable | None) -> None:
    payload: dict[str, np.ndarray] = {
        "version": np.asarray(CHECKPOINT_VERSION),
        "agent": np.asarray(cfg.agent),
        "env": np.asarray(cfg.env),
        "q_mode": np.asarray(cfg.q_mode),
        "embedding_kind": np.asarray(cfg.embedding_kind),
        "embedding_dim": np.asarray(-1 if cfg.embedding_dim is None else cfg.embedding_dim),
        "embedding_seed": np.asarray(cfg.embedding_seed),
        "gamma_e": np.asarray(cfg.gamma_e),
        "gamma_i": np.asarray(cfg.gamma_i),
    }
    for k, v in approx.state_dict().items():
        payload[f"approx_{k}"] = v
    if sf is not None:
        payload["sf_psi"] = sf.psi
        payload["sf_gamma"] = np.asarray(sf.gamma)
        payload["sf_convention"] = np.asarray(sf.convention)
    np.savez(path, **payload)


def load_checkpoint(path: str) -> dict:
    with np.load(path, allow_pickle=False) as data:
        version = str(data["version"])
        if version != CHECKPOINT_VERSION:
            raise ValueError(f"unsupported checkpoint version {version!r}")
        out = {
            "agent": str(data["agent"]),
            "env": str(data["env"]),
            "q_mode": str(data["q_mode"]),
            "embedding_kind": str(data["embedding_kind"]),
            "embedding_dim": int(data["embedding_dim"]),
            "embedding_seed": int(data["embedding_seed"]),
            "gamma_e": float(data["gamma_e"]),
            "gamma_i": float(data["gamma_i"]),
            "approx_state": {k[len("approx_"):]: data[k] for k in data.files
                             if k.startswith("approx_")},
        }
        if "sf_psi" in data.files:
            out["sf_psi"] = data["sf_psi"]
            out["sf_gamma"] = float(data["sf_gamma"])
            out["sf_convention"] = str(data["sf_convention"])
    return out


def rebuild_approx(ck: dict):
    """Reconstruct the approximator (and env) a checkpoint was trained on."""
    env = make_env(ck["env"])
    if ck["q_mode"] == "tabular":
        approx = TabularQ(env.n_states, env.n_actions,
                          gamma_e=ck["gamma_e"], gamma_i=ck["gamma_i"])
    else:
        dim = None if ck["embedding_dim"] < 0 else ck["embedding_dim"]
        emb = make_embedding(ck["embedding_kind"], env.n_states, dim=dim,
                             seed=ck["embedding_seed"])
        approx = DenseQ(emb, env.n_actions, gamma_e=ck["gamma_e"],
                        gamma_i=ck["gamma_i"])
    approx.load_state_dict(ck["approx_state"])
    return env, approx


def evaluate(checkpoint_path: str, env_name: str | None = None,
             episodes: int = 10, seed: int = 0, epsilon: float = 0.0) -> dict:
    """Greedy-extrinsic rollouts from a checkpoint; returns summary stats."""
    ck = load_checkpoint(checkpoint_path)
    env, approx = rebuild_approx(ck)
    if env_name is not None and env_name != ck["env"]:
        env = make_env(env_name)
        if env.n_states != approx.n_states:
            raise ValueError(
                f"checkpoint trained on {ck['env']!r} ({approx.n_states} states) "
                f"does not fit env {env_name!r} ({env.n_states} states)")
    env = GridWorld(env.spec, seed=seed)
    snap = Snapshot(approx)
    rng = Random(seed)
    returns, successes, lengths = [], [], []
    for _ in range(episodes):
        obs = env.reset()
        total = 0.0
        steps = 0
        done = False
        while not done:
            s = obs.state_id
            a = rng.randrange(4) if rng.random() < epsilon else snap.greedy[EXTRINSIC][s]
            obs, r, done = env.step(a)
            total += r
            steps += 1
        returns.append(total)
        successes.append(env.terminated)
        lengths.append(steps)
    return {
        "episodes": episodes,
        "mean_return": float(np.mean(returns)),
        "success_rate": float(np.mean(successes)),
        "mean_steps": float(np.mean(lengths)),
    }
