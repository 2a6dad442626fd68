"""Mutual information and entropy rate assembled from an entropy estimator."""

from __future__ import annotations

from collections import Counter
from typing import Callable, Hashable, Iterable, Mapping

import numpy as np

from .estimators import Histogram

__all__ = [
    "EntropyFn",
    "PairHistogram",
    "pair_histogram",
    "marginalize",
    "estimate_mi",
    "estimate_entropy_rate",
    "block_histogram",
]

EntropyFn = Callable[[Histogram], float]


class PairHistogram:
    """Joint counts of symbol pairs."""

    __slots__ = ("counts", "n")

    def __init__(self, counts: Mapping[tuple[Hashable, Hashable], int]):
        clean = {k: int(c) for k, c in counts.items() if int(c) > 0}
        if any(int(c) < 0 for c in counts.values()):
            raise ValueError("negative pair count")
        self.counts = clean
        self.n = sum(clean.values())
        if self.n < 1:
            raise ValueError("pair histogram must contain at least one observation")

    def transpose(self) -> "PairHistogram":
        return PairHistogram({(y, x): c for (x, y), c in self.counts.items()})

    def joint(self) -> Histogram:
        return Histogram(self.counts)


def pair_histogram(xs: Iterable[Hashable], ys: Iterable[Hashable]) -> PairHistogram:
    xs = list(xs)
    ys = list(ys)
    if len(xs) != len(ys):
        raise ValueError("paired samples must have equal length")
    return PairHistogram(Counter(zip(xs, ys)))


def marginalize(ph: PairHistogram, axis: str | int = "first") -> Histogram:
    """Histogram of the first (``axis="first"`` or 0) or second coordinate."""
    pos = {"first": 0, "second": 1, 0: 0, 1: 1}[axis]
    out: Counter = Counter()
    for key, c in ph.counts.items():
        out[key[pos]] += c
    return Histogram(out)


def estimate_mi(ph: PairHistogram, f: EntropyFn, clamp: bool = False) -> float:
    """``H(X) + H(Y) - H(X, Y)`` with each term estimated by ``f``."""
    if ph.n < 2:
        raise ValueError("need n >= 2")
    hx = f(marginalize(ph, 0))
    hy = f(marginalize(ph, 1))
    mi = (hx + hy) - f(ph.joint())
    return max(mi, 0.0) if clamp else mi


def block_histogram(seq, length: int) -> Histogram:
    """Histogram of the overlapping ``length``-tuples of ``seq``."""
    arr = np.asarray(seq)
    _, codes = np.unique(arr, return_inverse=True)
    codes = codes.astype(np.int64).ravel()
    windows = np.lib.stride_tricks.sliding_window_view(codes, length)
    _, counts = np.unique(windows, axis=0, return_counts=True)
    return Histogram.from_counts(counts)


def estimate_entropy_rate(seq, D: int, f: EntropyFn) -> float:
    """``H(X_1..X_{D+1}) - H(X_1..X_D)`` from overlapping block histograms."""
    seq = np.asarray(seq)
    if D < 0:
        raise ValueError("memory length D must be non-negative")
    if len(seq) < D + 2:
        raise ValueError(f"sequence of length {len(seq)} too short for D={D}")
    upper = f(block_histogram(seq, D + 1))
    if D == 0:
        return upper
    return upper - f(block_histogram(seq, D))
