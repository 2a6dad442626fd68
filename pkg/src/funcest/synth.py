"""Distributions, samplers and exact truth values for the experiments.

Randomness comes from :func:`make_rng`, a Philox counter-based generator
keyed by ``(seed, stream)`` so that Monte-Carlo trials can be run in any order
and still reproduce.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .estimators import Histogram

__all__ = [
    "make_rng",
    "as_distribution",
    "uniform_dist",
    "zipf_dist",
    "beta_random_dist",
    "sample_multinomial",
    "sample_poissonized",
    "sample_symbols",
    "StarTree",
    "star_tree_dataset",
    "additive_markov_sequence",
    "mod_channel_joint",
    "sample_joint",
    "true_entropy",
    "true_falpha",
    "true_renyi",
    "true_mi",
]


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Philox generator for a master seed and a (possibly multi-part) stream id."""
    key = tuple(int(s) for s in stream) or (0,)
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=key)
    return np.random.Generator(np.random.Philox(ss))


def as_distribution(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or len(p) == 0:
        raise ValueError("a distribution is a non-empty probability vector")
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
        raise ValueError("probabilities must be non-negative and sum to one")
    return p


def _normalize(w):
    w = np.asarray(w, dtype=float)
    return w / math.fsum(w)


def uniform_dist(S: int) -> np.ndarray:
    if S < 1:
        raise ValueError("S must be at least 1")
    return np.full(S, 1.0 / S)


def zipf_dist(S: int, alpha: float = 1.0) -> np.ndarray:
    if S < 1:
        raise ValueError("S must be at least 1")
    return _normalize(np.arange(1, S + 1, dtype=float) ** -alpha)


def beta_random_dist(S: int, a: float, b: float, rng: np.random.Generator) -> np.ndarray:
    """S independent Beta(a, b) weights, normalised."""
    if S < 1 or not (a > 0 and b > 0):
        raise ValueError("need S >= 1 and positive Beta parameters")
    w = rng.beta(a, b, size=S)
    while not w.sum() > 0:
        w = rng.beta(a, b, size=S)
    return _normalize(w)


def sample_multinomial(p, n: int, rng: np.random.Generator) -> Histogram:
    if n < 1:
        raise ValueError("n must be at least 1")
    return Histogram.from_counts(rng.multinomial(n, np.asarray(p, dtype=float)))


def sample_poissonized(p, n: int, rng: np.random.Generator) -> Histogram | None:
    """Independent Poisson(n p_i) counts.  Returns None if nothing was drawn."""
    if n < 1:
        raise ValueError("n must be at least 1")
    counts = rng.poisson(n * np.asarray(p, dtype=float))
    return Histogram.from_counts(counts) if counts.any() else None


def sample_symbols(p, n: int, rng: np.random.Generator) -> np.ndarray:
    """n i.i.d. symbol ids drawn from ``p``."""
    p = np.asarray(p, dtype=float)
    cdf = np.cumsum(p)
    cdf[-1] = 1.0
    return np.searchsorted(cdf, rng.random(n), side="right").clip(0, len(p) - 1)


@dataclass(frozen=True)
class StarTree:
    """Star-shaped model: a root marginal and one transition matrix per leaf."""

    root: np.ndarray
    transitions: np.ndarray  # (d - 1, S, S); row x gives P(X_k | X_0 = x)

    @property
    def d(self):
        return self.transitions.shape[0] + 1

    @property
    def edges(self):
        return frozenset((0, k) for k in range(1, self.d))

    def pair_joint(self, i: int, j: int) -> np.ndarray:
        """Exact joint distribution of variables i and j."""
        if i == j:
            raise ValueError("need two distinct variables")
        T = self.transitions
        root = self.root
        if i == 0:
            return root[:, None] * T[j - 1]
        if j == 0:
            return (root[:, None] * T[i - 1]).T
        return np.einsum("x,xa,xb->ab", root, T[i - 1], T[j - 1])

    def joint(self) -> np.ndarray:
        """Full joint table; only sensible for tiny d and S."""
        out = self.root
        for k in range(self.d - 1):
            T = self.transitions[k]
            out = out[..., None] * T.reshape((T.shape[0],) + (1,) * (out.ndim - 1) + (T.shape[1],))
        return out


def star_tree_dataset(d: int, S: int, n: int, rng: np.random.Generator, a: float = 0.5,
                      b: float = 0.5):
    """Sample n rows from a random star tree centred on variable 0.

    Returns ``(data, model)`` where ``data`` is an (n, d) integer matrix.
    """
    if d < 3 or S < 2:
        raise ValueError("need d >= 3 and S >= 2")
    root = beta_random_dist(S, a, b, rng)
    T = np.stack([np.stack([beta_random_dist(S, a, b, rng) for _ in range(S)])
                  for _ in range(d - 1)])
    model = StarTree(root=root, transitions=T)
    data = np.empty((n, d), dtype=np.int64)
    data[:, 0] = sample_symbols(root, n, rng)
    cdfs = np.cumsum(T, axis=2)
    cdfs[..., -1] = 1.0
    for k in range(1, d):
        u = rng.random(n)
        rows = cdfs[k - 1][data[:, 0]]
        data[:, k] = (u[:, None] >= rows).sum(axis=1).clip(0, S - 1)
    return data, model


def additive_markov_sequence(S: int, D: int, n: int, rng: np.random.Generator,
                             p_z=None):
    """``X_k = (Z_k + X_{k-D} + ... + X_{k-1}) mod S`` with i.i.d. innovations.

    The first D symbols are the innovations themselves.  Returns the sequence
    and the true entropy rate H(P_Z).
    """
    if S < 2 or D < 1 or n <= D:
        raise ValueError("need S >= 2, D >= 1 and n > D")
    pz = beta_random_dist(S, 0.6, 0.5, rng) if p_z is None else as_distribution(p_z)
    z = sample_symbols(pz, n, rng)
    x = np.empty(n, dtype=np.int64)
    x[:D] = z[:D]
    window = int(x[:D].sum())
    for k in range(D, n):
        x[k] = (z[k] + window) % S
        window += int(x[k]) - int(x[k - D])
    return x, true_entropy(pz)


def mod_channel_joint(px, pz) -> np.ndarray:
    """Joint of (X, Y) with ``Y = (X + Z) mod S`` and Z independent of X."""
    px = np.asarray(px, dtype=float)
    pz = np.asarray(pz, dtype=float)
    S = len(px)
    idx = (np.arange(S)[None, :] - np.arange(S)[:, None]) % S
    return px[:, None] * pz[idx]


def sample_joint(joint, n: int, rng: np.random.Generator) -> np.ndarray:
    """n draws of (row, column) index pairs from a joint table."""
    joint = np.asarray(joint, dtype=float)
    flat = sample_symbols(joint.ravel(), n, rng)
    return np.column_stack(np.unravel_index(flat, joint.shape))


def true_entropy(p) -> float:
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    return -math.fsum(p * np.log(p))


def true_falpha(p, alpha: float) -> float:
    p = np.asarray(p, dtype=float).ravel()
    return math.fsum(p[p > 0] ** alpha)


def true_renyi(p, alpha: float) -> float:
    if alpha == 1:
        return true_entropy(p)
    return math.log(true_falpha(p, alpha)) / (1.0 - alpha)


def true_mi(joint) -> float:
    """``sum p(x,y) ln(p(x,y) / (p(x) p(y)))`` by direct summation."""
    joint = np.asarray(joint, dtype=float)
    px = joint.sum(axis=1, keepdims=True)
    py = joint.sum(axis=0, keepdims=True)
    mask = joint > 0
    ratio = joint[mask] / (px * py)[mask]
    return math.fsum(joint[mask] * np.log(ratio))
