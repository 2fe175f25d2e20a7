"""Run configuration: INI-style files, validation, and the run manifest.

Sections and keys:

    [run]        env, agent (m|bonus|sid), budget, seed, actors, k, slots,
                 deterministic, learner_steps_per_episode, epsilon_base,
                 epsilon_alpha, out
    [embedding]  kind (one_hot|random_projection), dim, seed
    [sf]         gamma, alpha, convention
    [intrinsic]  kind (sfc|icm|rnd|none), eta, gamma_i, scale
    [qlearn]     mode (tabular|dense), alpha, lr, gamma_e, gamma_i,
                 sync_interval, snapshot_interval
    [replay]     main_capacity, high_capacity, batch, high_share
    [scheduler]  kind (random|switching|macro_q|threshold_q), variant
                 (running_mean|heuristic_median), threshold, epsilon, alpha

Every key has a default; a config file only has to name what it changes.
"""

from __future__ import annotations

import configparser
import hashlib
import json
from dataclasses import asdict, dataclass, field

AGENT_KINDS = ("m", "bonus", "sid")
INTRINSIC_KINDS = ("sfc", "icm", "rnd", "none")
SCHEDULER_KINDS = ("random", "switching", "macro_q", "threshold_q")
THRESHOLD_VARIANTS = ("running_mean", "heuristic_median")


@dataclass
class RunConfig:
    env: str = "flytrap"
    agent: str = "sid"
    budget: int = 100_000
    seed: int = 0
    actors: int = 8
    k: int = 5
    slots: int = 8
    deterministic: bool = True
    learner_steps_per_episode: int = 6
    actor_epsilon_base: float = 0.4
    actor_epsilon_alpha: float = 7.0
    out: str = "runs/out"

    embedding_kind: str = "one_hot"
    embedding_dim: int | None = None
    embedding_seed: int = 0

    sf_gamma: float = 0.98
    sf_alpha: float = 0.1
    sf_convention: str = "next_state_only"

    intrinsic_kind: str = "sfc"
    eta: float = 3.0
    gamma_i_norm: float = 0.99
    intrinsic_scale: float = 1.0

    q_mode: str = "tabular"
    q_alpha: float = 0.1
    q_lr: float = 1e-4
    gamma_e: float = 0.99
    gamma_i: float = 0.99
    sync_interval: int = 500
    snapshot_interval: int = 100

    main_capacity: int = 40_000
    high_capacity: int = 10_000
    batch: int = 128
    high_share: int = 32

    scheduler: str | None = None  # sid default resolves to "random"
    threshold_variant: str = "running_mean"
    threshold: float = 0.007
    macro_epsilon: float = 0.1
    macro_alpha: float = 0.1

    def validate(self) -> "RunConfig":
        if self.agent not in AGENT_KINDS:
            raise ValueError(f"agent must be one of {AGENT_KINDS}, got {self.agent!r}")
        if self.intrinsic_kind not in INTRINSIC_KINDS:
            raise ValueError(f"intrinsic.kind must be one of {INTRINSIC_KINDS}")
        if self.scheduler is not None and self.scheduler not in SCHEDULER_KINDS:
            raise ValueError(f"scheduler must be one of {SCHEDULER_KINDS}")
        if self.threshold_variant not in THRESHOLD_VARIANTS:
            raise ValueError(f"scheduler.variant must be one of {THRESHOLD_VARIANTS}")
        if self.agent == "m":
            if self.scheduler is not None:
                raise ValueError("agent m takes no scheduler")
            if self.intrinsic_kind != "none":
                raise ValueError("agent m takes no intrinsic model (intrinsic.kind=none)")
        if self.agent == "bonus":
            if self.scheduler is not None:
                raise ValueError("agent bonus takes no scheduler")
            if self.intrinsic_kind == "none":
                raise ValueError("agent bonus requires an intrinsic kind")
        if self.agent == "sid" and self.intrinsic_kind == "none":
            raise ValueError("agent sid requires an intrinsic kind")
        if self.budget < 0:
            raise ValueError("budget must be >= 0")
        for name in ("actors", "k", "slots", "learner_steps_per_episode",
                     "main_capacity", "high_capacity", "batch", "high_share",
                     "sync_interval", "snapshot_interval"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.high_share >= self.batch:
            raise ValueError("high_share must be smaller than batch")
        if not 0.0 < self.actor_epsilon_base <= 1.0:
            raise ValueError("epsilon_base must be in (0, 1]")
        if self.actor_epsilon_alpha < 0.0:
            raise ValueError("epsilon_alpha must be >= 0")
        if self.q_mode not in ("tabular", "dense"):
            raise ValueError("qlearn.mode must be tabular or dense")
        if self.embedding_kind not in ("one_hot", "random_projection"):
            raise ValueError("embedding.kind must be one_hot or random_projection")
        return self

    @property
    def resolved_scheduler(self) -> str:
        return self.scheduler or "random"

    def manifest_hash(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


_SECTION_FIELDS = {
    "run": {
        "env": ("env", str),
        "agent": ("agent", str),
        "budget": ("budget", int),
        "seed": ("seed", int),
        "actors": ("actors", int),
        "k": ("k", int),
        "slots": ("slots", int),
        "deterministic": ("deterministic", bool),
        "learner_steps_per_episode": ("learner_steps_per_episode", int),
        "epsilon_base": ("actor_epsilon_base", float),
        "epsilon_alpha": ("actor_epsilon_alpha", float),
        "out": ("out", str),
    },
    "embedding": {
        "kind": ("embedding_kind", str),
        "dim": ("embedding_dim", int),
        "seed": ("embedding_seed", int),
    },
    "sf": {
        "gamma": ("sf_gamma", float),
        "alpha": ("sf_alpha", float),
        "convention": ("sf_convention", str),
    },
    "intrinsic": {
        "kind": ("intrinsic_kind", str),
        "eta": ("eta", float),
        "gamma_i": ("gamma_i_norm", float),
        "scale": ("intrinsic_scale", float),
    },
    "qlearn": {
        "mode": ("q_mode", str),
        "alpha": ("q_alpha", float),
        "lr": ("q_lr", float),
        "gamma_e": ("gamma_e", float),
        "gamma_i": ("gamma_i", float),
        "sync_interval": ("sync_interval", int),
        "snapshot_interval": ("snapshot_interval", int),
    },
    "replay": {
        "main_capacity": ("main_capacity", int),
        "high_capacity": ("high_capacity", int),
        "batch": ("batch", int),
        "high_share": ("high_share", int),
    },
    "scheduler": {
        "kind": ("scheduler", str),
        "variant": ("threshold_variant", str),
        "threshold": ("threshold", float),
        "epsilon": ("macro_epsilon", float),
        "alpha": ("macro_alpha", float),
    },
}


def parse_config(text: str) -> RunConfig:
    parser = configparser.ConfigParser()
    parser.read_string(text)
    cfg = RunConfig()
    for section in parser.sections():
        if section not in _SECTION_FIELDS:
            raise ValueError(f"unknown config section [{section}]")
        known = _SECTION_FIELDS[section]
        for key, raw in parser.items(section):
            if key not in known:
                raise ValueError(f"unknown key {key!r} in [{section}]")
            attr, typ = known[key]
            if typ is bool:
                value = parser.getboolean(section, key)
            elif typ is int:
                value = parser.getint(section, key)
            elif typ is float:
                value = parser.getfloat(section, key)
            else:
                value = raw
            setattr(cfg, attr, value)
    return cfg.validate()


def load_config(path: str) -> RunConfig:
    with open(path) as fh:
        return parse_config(fh.read())


@dataclass
class RunManifest:
    config_hash: str
    seeds: list[int]
    version: str
    outputs: dict[str, str] = field(default_factory=dict)

    def write(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(asdict(self), fh, indent=2, sort_keys=True)
            fh.write("\n")


def make_manifest(cfg: RunConfig, seeds: list[int], outputs=None) -> RunManifest:
    from . import __version__

    return RunManifest(
        config_hash=cfg.manifest_hash(),
        seeds=list(seeds),
        version=__version__,
        outputs=dict(outputs or {}),
    )
