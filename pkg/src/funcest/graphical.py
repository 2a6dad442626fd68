"""Chow-Liu tree learning with a pluggable mutual information estimate."""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .composite import EntropyFn
from .estimators import Histogram

__all__ = [
    "TreeModel",
    "pairwise_mi_matrix",
    "mwst",
    "chow_liu",
    "wrong_edges_ratio",
    "edge_difference_ratio",
    "spanning_trees",
]


def _norm_edge(i, j):
    i, j = int(i), int(j)
    if i == j:
        raise ValueError("self loops are not tree edges")
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class TreeModel:
    d: int
    edges: frozenset

    def __post_init__(self):
        object.__setattr__(self, "edges", frozenset(_norm_edge(*e) for e in self.edges))

    def is_valid(self) -> bool:
        """d - 1 edges that join all d nodes without a cycle."""
        if len(self.edges) != self.d - 1:
            return False
        ds = _DisjointSet(self.d)
        for i, j in self.edges:
            if not (0 <= i < self.d and 0 <= j < self.d) or not ds.union(i, j):
                return False
        return True

    def weight(self, W) -> float:
        return float(sum(W[i, j] for i, j in self.edges))


class _DisjointSet:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


def _column_mi(data, i, j, f):
    pairs = np.ascontiguousarray(data[:, [i, j]])
    _, counts = np.unique(pairs, axis=0, return_counts=True)
    _, cx = np.unique(data[:, i], return_counts=True)
    _, cy = np.unique(data[:, j], return_counts=True)
    hx = f(Histogram.from_counts(cx))
    hy = f(Histogram.from_counts(cy))
    return (hx + hy) - f(Histogram.from_counts(counts))


def pairwise_mi_matrix(data, f: EntropyFn, workers: int = 1) -> np.ndarray:
    """Symmetric matrix of pairwise MI estimates between the columns of ``data``."""
    data = np.asarray(data)
    if data.ndim != 2 or data.shape[1] < 2:
        raise ValueError("data must be an (n, d) matrix with d >= 2")
    if data.shape[0] < 2:
        raise ValueError("need at least two rows")
    d = data.shape[1]
    pairs = list(itertools.combinations(range(d), 2))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            vals = list(pool.map(lambda ij: _column_mi(data, *ij, f), pairs))
    else:
        vals = [_column_mi(data, i, j, f) for i, j in pairs]
    W = np.zeros((d, d))
    for (i, j), v in zip(pairs, vals):
        W[i, j] = W[j, i] = v
    return W


def mwst(weights) -> TreeModel:
    """Maximum-weight spanning tree by Kruskal, ties broken by (i, j)."""
    W = np.asarray(weights, dtype=float)
    d = W.shape[0]
    if W.shape != (d, d) or d < 2:
        raise ValueError("weights must be a square matrix with d >= 2")
    if not np.all(np.isfinite(W)):
        raise ValueError("weights must be finite")
    order = sorted(itertools.combinations(range(d), 2), key=lambda e: (-W[e], e))
    ds = _DisjointSet(d)
    edges = []
    for i, j in order:
        if ds.union(i, j):
            edges.append((i, j))
            if len(edges) == d - 1:
                break
    return TreeModel(d, frozenset(edges))


def chow_liu(data, f: EntropyFn, workers: int = 1) -> TreeModel:
    return mwst(pairwise_mi_matrix(data, f, workers=workers))


def wrong_edges_ratio(est: TreeModel, truth: TreeModel) -> float:
    """Share of estimated edges outside a star-shaped truth, over d - 2."""
    if est.d != truth.d:
        raise ValueError("trees are over different numbers of variables")
    if truth.d < 3:
        raise ValueError("wrong-edges ratio needs d >= 3")
    return len(est.edges - truth.edges) / (truth.d - 2)


def edge_difference_ratio(est: TreeModel, truth: TreeModel) -> float:
    """Symmetric difference of edge sets over 2(d - 1); defined for any truth."""
    if est.d != truth.d:
        raise ValueError("trees are over different numbers of variables")
    return len(est.edges ^ truth.edges) / (2.0 * (truth.d - 1))


def spanning_trees(d: int):
    """Every spanning tree of the complete graph on d nodes (small d only)."""
    all_edges = list(itertools.combinations(range(d), 2))
    for subset in itertools.combinations(all_edges, d - 1):
        t = TreeModel(d, frozenset(subset))
        if t.is_valid():
            yield t
