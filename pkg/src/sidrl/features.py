"""Fixed state embeddings.

The embedding maps a tabular state id to a real vector and is never
trained.  Two kinds: one-hot basis vectors, and a random Gaussian
projection drawn once from a seed.  Both are immutable after
construction and safe to share across threads.
"""

from __future__ import annotations

import numpy as np


class OneHot:
    """Unit basis vectors; dimension equals the number of states."""

    kind = "one_hot"

    def __init__(self, n_states: int):
        if n_states <= 0:
            raise ValueError("n_states must be positive")
        self.n_states = n_states
        self.dim = n_states

    def embed(self, state_id: int) -> np.ndarray:
        if not 0 <= state_id < self.n_states:
            raise ValueError(f"state_id {state_id} out of range [0, {self.n_states})")
        v = np.zeros(self.dim)
        v[state_id] = 1.0
        return v


class RandomProjection:
    """Columns of a fixed (dim x n_states) Gaussian matrix.

    Entries are i.i.d. normal(0, 1/dim) so squared column norms sit
    near 1 regardless of dim.
    """

    kind = "random_projection"

    def __init__(self, n_states: int, dim: int = 64, seed: int = 0):
        if n_states <= 0 or dim <= 0:
            raise ValueError("n_states and dim must be positive")
        self.n_states = n_states
        self.dim = dim
        self.seed = seed
        rng = np.random.default_rng(seed)
        self.matrix = rng.normal(0.0, 1.0 / np.sqrt(dim), size=(dim, n_states))
        self.matrix.setflags(write=False)

    def embed(self, state_id: int) -> np.ndarray:
        if not 0 <= state_id < self.n_states:
            raise ValueError(f"state_id {state_id} out of range [0, {self.n_states})")
        return self.matrix[:, state_id].copy()


def feature_rows(embedding) -> np.ndarray:
    """The (n_states x dim) matrix whose row s is embed(s)."""
    if isinstance(embedding, OneHot):
        return np.eye(embedding.n_states)
    return np.ascontiguousarray(embedding.matrix.T)


def make_embedding(kind: str, n_states: int, dim: int | None = None, seed: int = 0):
    if kind == "one_hot":
        if dim is not None and dim != n_states:
            raise ValueError("one_hot requires dim == n_states")
        return OneHot(n_states)
    if kind == "random_projection":
        return RandomProjection(n_states, dim=dim or 64, seed=seed)
    raise ValueError(f"unknown embedding kind {kind!r}")
