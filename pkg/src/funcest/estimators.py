"""Two-regime estimators of entropy, power sums and Renyi entropy.

Symbols whose empirical frequency is at most ``2*delta`` are handled by an
unbiased estimate of the best polynomial approximation of the functional on
``[0, 4*delta]``; larger frequencies use a bias-corrected plug-in.  Only
observed symbols contribute, so the support size never has to be known.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping

import numpy as np

from .approx import NegXLogX, PowerAlpha, cached_approx, window_coeffs

logger = logging.getLogger(__name__)

__all__ = [
    "Histogram",
    "EstimatorConfig",
    "Thresholds",
    "histogram_from_samples",
    "thresholds",
    "interp_window",
    "s_poly_eval",
    "estimate_entropy",
    "estimate_falpha",
    "estimate_renyi",
    "regime_counts",
]


class Histogram:
    """Counts of observed symbols.  Unseen symbols are simply absent."""

    __slots__ = ("counts", "n", "_values")

    def __init__(self, counts: Mapping[Hashable, int]):
        clean = {}
        for sym, c in counts.items():
            c = int(c)
            if c < 0:
                raise ValueError(f"negative count for symbol {sym!r}")
            if c:
                clean[sym] = c
        n = sum(clean.values())
        if n < 1:
            raise ValueError("histogram must contain at least one observation")
        self.counts = clean
        self.n = n
        self._values = None

    @classmethod
    def from_counts(cls, counts) -> "Histogram":
        """Build from a count vector indexed by symbol id; zeros are dropped."""
        arr = np.asarray(counts)
        if arr.ndim != 1:
            raise ValueError("count vector must be one-dimensional")
        idx = np.flatnonzero(arr)
        return cls(dict(zip(idx.tolist(), arr[idx].tolist())))

    @property
    def values(self) -> np.ndarray:
        """Sorted count vector; sorting makes every estimate label invariant bit for bit."""
        if self._values is None:
            v = np.fromiter(self.counts.values(), dtype=np.int64, count=len(self.counts))
            v.sort()
            self._values = v
        return self._values

    @property
    def support(self) -> int:
        return len(self.counts)

    def __len__(self):
        return len(self.counts)

    def __eq__(self, other):
        return isinstance(other, Histogram) and self.counts == other.counts

    def __repr__(self):
        return f"Histogram(n={self.n}, support={self.support})"


def histogram_from_samples(samples: Iterable[Hashable]) -> Histogram:
    counts = Counter(samples)
    if not counts:
        raise ValueError("cannot build a histogram from an empty sample")
    return Histogram(counts)


@dataclass(frozen=True)
class EstimatorConfig:
    """Tuning constants and switches.

    ``delta = c1*ln(n)/n`` sets the regime boundary and ``K = ceil(c2*ln(n))``
    the approximation degree.  ``split`` thins the sample into two halves
    (one for the regime test, one for the estimate); ``seed`` drives it.
    """

    c1: float = 0.2
    c2: float = 0.7
    split: bool = False
    keep_constant_term: bool = True
    k_min: int = 1
    renyi_floor: float = 1e-12
    seed: int = 0

    def __post_init__(self):
        if not (0 < self.c1 <= 10):
            raise ValueError(f"c1 must lie in (0, 10], got {self.c1}")
        if not self.c2 > 0:
            raise ValueError(f"c2 must be positive, got {self.c2}")
        if self.k_min < 1:
            raise ValueError("k_min must be at least 1")
        if not self.renyi_floor > 0:
            raise ValueError("renyi_floor must be positive")
        if self.c2 > 4 * self.c1:
            logger.info("c2=%g > 4*c1=%g: outside the range covered by the risk bounds",
                        self.c2, 4 * self.c1)


@dataclass(frozen=True)
class Thresholds:
    delta: float
    K: int
    t: float


def thresholds(n: int, cfg: EstimatorConfig = EstimatorConfig()) -> Thresholds:
    if n < 2:
        raise ValueError(f"need n >= 2 for the regime thresholds, got n={n}")
    ln = math.log(n)
    delta = cfg.c1 * ln / n
    K = max(math.ceil(cfg.c2 * ln), cfg.k_min)
    return Thresholds(delta=delta, K=K, t=delta / 4.0)


def _smoothstep9(u):
    u2 = u * u
    return u2 * u2 * u * (126.0 - u * (420.0 - u * (540.0 - u * (315.0 - 70.0 * u))))


def interp_window(x, t):
    """0 below ``t``, 1 above ``2t``, a C^4 degree-9 blend in between."""
    if not t > 0:
        raise ValueError("t must be positive")
    x = np.asarray(x, dtype=float)
    u = np.clip((x - t) / t, 0.0, 1.0)
    out = np.where(x <= t, 0.0, np.where(x >= 2 * t, 1.0, _smoothstep9(u)))
    return float(out) if out.ndim == 0 else out


def s_poly_eval(count, n, w, keep_constant_term=True):
    """Unbiased estimate of the windowed polynomial at ``p``.

    Uses ``prod_{r<k} (count - r)/n``, whose mean is ``p**k`` when
    ``count ~ Poisson(n p)``.  ``count`` may be an array.
    """
    c = np.asarray(count, dtype=float)
    coeffs = w.coeffs
    total = np.full(c.shape, coeffs[0] if keep_constant_term else 0.0)
    prod = np.ones(c.shape)
    for k in range(1, len(coeffs)):
        prod = prod * (c - (k - 1)) / n
        total = total + coeffs[k] * prod
    return float(total) if total.ndim == 0 else total


def _split(counts, n, seed):
    rng = np.random.default_rng(seed)
    first = rng.binomial(counts, 0.5)
    half = n / 2.0
    if half < 2:
        raise ValueError("sample splitting needs n >= 4")
    return first, counts - first, half


def _two_regime(h, cfg, target, smooth, diagnostics):
    counts = h.values
    n = h.n
    if n < 2:
        raise ValueError(f"need n >= 2, got n={n}")
    if cfg.split:
        est_counts, test_counts, n_eff = _split(counts, n, cfg.seed)
    else:
        est_counts, test_counts, n_eff = counts, counts, float(n)
    th = thresholds(int(n_eff) if cfg.split else n, cfg)
    x = est_counts / n_eff
    nonsmooth = test_counts / n_eff <= 2 * th.delta

    w = window_coeffs(cached_approx(target, th.K), target, th.delta)
    low = np.minimum(s_poly_eval(est_counts[nonsmooth], n_eff, w, cfg.keep_constant_term), 1.0)
    high = smooth(x[~nonsmooth], n_eff, th.t)
    if diagnostics is not None:
        diagnostics.update(
            nonsmooth=int(nonsmooth.sum()),
            smooth=int((~nonsmooth).sum()),
            capped=int(np.sum(low >= 1.0)),
            degree=th.K,
            delta=th.delta,
        )
    return math.fsum(low) + math.fsum(high)


def estimate_entropy(h: Histogram, cfg: EstimatorConfig = EstimatorConfig(),
                     diagnostics: dict | None = None) -> float:
    """Entropy estimate in nats."""

    def smooth(x, n, t):
        xs = np.where(x > 0, x, 1.0)
        return interp_window(x, t) * (np.where(x > 0, -x * np.log(xs), 0.0) + 0.5 / n)

    return _two_regime(h, cfg, NegXLogX(), smooth, diagnostics)


def _check_alpha(alpha):
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if alpha == 1:
        raise ValueError("alpha = 1 is the trivial power sum F_1 = 1; use estimate_entropy")


def estimate_falpha(h: Histogram, alpha: float, cfg: EstimatorConfig = EstimatorConfig(),
                    diagnostics: dict | None = None) -> float:
    """Estimate of ``sum_i p_i**alpha``."""
    _check_alpha(alpha)

    def smooth(x, n, t):
        xs = np.where(x > 0, x, 1.0)
        val = (1.0 + alpha * (1.0 - alpha) / (2.0 * n * xs)) * xs**alpha
        return interp_window(x, t) * np.where(x > 0, val, 0.0)

    return _two_regime(h, cfg, PowerAlpha(alpha), smooth, diagnostics)


def estimate_renyi(h: Histogram, alpha: float, cfg: EstimatorConfig = EstimatorConfig(),
                   diagnostics: dict | None = None) -> float:
    """Renyi entropy ``ln(F_alpha)/(1-alpha)`` from the power-sum estimate."""
    diag = {} if diagnostics is None else diagnostics
    f = estimate_falpha(h, alpha, cfg, diag)
    diag["falpha"] = f
    diag["clamped"] = f < cfg.renyi_floor
    if diag["clamped"]:
        logger.warning("power-sum estimate %g below floor; clamped to %g", f, cfg.renyi_floor)
        f = cfg.renyi_floor
    return math.log(f) / (1.0 - alpha)


def regime_counts(h: Histogram, cfg: EstimatorConfig = EstimatorConfig()) -> dict:
    """Number of observed symbols sent to each regime (entropy estimator)."""
    diag: dict = {}
    estimate_entropy(h, cfg, diag)
    return diag
