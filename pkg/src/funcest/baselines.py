"""Classical entropy estimators used as comparison points.

All functions take a :class:`~funcest.estimators.Histogram` and return nats.
Estimators that need the alphabet size take it explicitly; the Miller-Madow
correction can fall back to the observed support.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .estimators import Histogram

__all__ = [
    "SupportHint",
    "Observed",
    "Known",
    "DegenerateCoverageError",
    "digamma",
    "mle_entropy",
    "miller_madow",
    "jackknife_entropy",
    "cae_entropy",
    "grassberger_g",
    "grassberger_table",
    "grassberger_entropy",
    "dirichlet_plugin_entropy",
    "dirichlet_bayes_entropy",
    "shrinkage_entropy",
]


@dataclass(frozen=True)
class SupportHint:
    size: int | None = None

    def resolve(self, h: Histogram) -> int:
        if self.size is None:
            return h.support
        if self.size < h.support:
            raise ValueError(f"support size {self.size} is smaller than the "
                             f"{h.support} observed symbols")
        return self.size


Observed = SupportHint()


def Known(S: int) -> SupportHint:
    if S < 1:
        raise ValueError("support size must be at least 1")
    return SupportHint(int(S))


class DegenerateCoverageError(ArithmeticError):
    """Every observed symbol is a singleton, so the coverage estimate is zero."""


# Bernoulli-number terms B_2k / (2k) of the digamma asymptotic series
_PSI_SERIES = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)


def digamma(x):
    """psi(x) = d/dx ln Gamma(x) for x > 0 (scalar or array)."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise ValueError("digamma is only defined here for x > 0")
    shift = np.zeros_like(x)
    y = x.copy()
    small = y < 8.0
    while np.any(small):
        shift[small] -= 1.0 / y[small]
        y[small] += 1.0
        small = y < 8.0
    inv2 = 1.0 / (y * y)
    series = np.zeros_like(y)
    for c in reversed(_PSI_SERIES):
        series = (series + c) * inv2
    out = shift + np.log(y) - 0.5 / y - series
    return float(out) if out.ndim == 0 else out


def _plugin(p):
    p = p[p > 0]
    return -math.fsum(p * np.log(p))


def mle_entropy(h: Histogram) -> float:
    return _plugin(h.values / h.n)


def miller_madow(h: Histogram, s: SupportHint = Observed) -> float:
    S = s.resolve(h)
    return mle_entropy(h) + (S - 1) / (2.0 * h.n)


def jackknife_entropy(h: Histogram) -> float:
    """Leave-one-out jackknife of the plug-in estimate.

    The n leave-one-out histograms are grouped by the count that loses an
    observation, so the cost is linear in the number of distinct counts.
    """
    n = h.n
    if n < 2:
        raise ValueError("jackknife needs n >= 2")
    c = h.values.astype(float)
    H = math.fsum(c / n * np.log(n / c))
    vals, mult = np.unique(c, return_counts=True)
    m = n - 1
    full = c / m * np.log(m / c)
    removed = vals / m * np.log(m / vals)
    reduced = vals - 1.0
    kept = np.where(reduced > 0, reduced / m * np.log(m / np.where(reduced > 0, reduced, 1.0)), 0.0)
    loo = math.fsum(full) - removed + kept
    loo_sum = math.fsum(vals * mult * loo)
    return n * H - (n - 1) / n * loo_sum


def cae_entropy(h: Histogram) -> float:
    """Coverage-adjusted (Horvitz-Thompson) entropy estimate."""
    c = h.values
    n = h.n
    f1 = int(np.sum(c == 1))
    cov = 1.0 - f1 / n
    if cov <= 0:
        raise DegenerateCoverageError("all observed symbols are singletons")
    pa = cov * c / n
    # 1 - (1 - pa)**n, exactly 1 when a single symbol covers the sample
    safe = np.where(pa < 1, pa, 0.0)
    denom = np.where(pa < 1, -np.expm1(n * np.log1p(-safe)), 1.0)
    return math.fsum(-pa * np.log(pa) / denom)


def _integral(k):
    return integrate.quad(lambda x: x ** (k - 1) / (1.0 + x), 0.0, 1.0,
                          epsabs=1e-15, epsrel=1e-14, limit=200)[0]


@lru_cache(maxsize=8)
def _grassberger_cached(kmax):
    k0 = kmax + 40
    I = np.empty(k0 + 1)
    I[k0] = _integral(k0)
    # backward recurrence I_k = 1/k - I_{k+1} damps the anchor error
    for k in range(k0 - 1, 0, -1):
        I[k] = 1.0 / k - I[k + 1]
    k = np.arange(1, kmax + 1)
    G = np.empty(kmax + 1)
    G[0] = np.nan
    G[1:] = digamma(k.astype(float)) + np.where(k % 2 == 0, 1.0, -1.0) * I[1:kmax + 1]
    G.setflags(write=False)
    return G


def grassberger_table(kmax: int) -> np.ndarray:
    """``G[k]`` for 1 <= k <= kmax (index 0 unused)."""
    if kmax < 1:
        raise ValueError("kmax must be at least 1")
    size = 1 << max(6, int(kmax - 1).bit_length())
    return _grassberger_cached(size)[: kmax + 1]


def grassberger_g(k: int) -> float:
    if k < 1:
        raise ValueError("G_k is defined for k >= 1")
    return float(grassberger_table(int(k))[int(k)])


def grassberger_entropy(h: Histogram) -> float:
    c = h.values
    G = grassberger_table(int(c.max()))
    return math.log(h.n) - math.fsum(c / h.n * G[c])


def _default_a(n, S):
    return math.sqrt(n) / S


def _full_counts(h, S):
    if S < h.support:
        raise ValueError(f"support size {S} is smaller than the {h.support} observed symbols")
    return h.values, S - h.support


def dirichlet_plugin_entropy(h: Histogram, S: int, a: float | None = None) -> float:
    c, unseen = _full_counts(h, S)
    a = _default_a(h.n, S) if a is None else a
    if not a > 0:
        raise ValueError("Dirichlet parameter a must be positive")
    denom = h.n + S * a
    p = (c + a) / denom
    q = a / denom
    return _plugin(p) + (unseen * -q * math.log(q) if unseen else 0.0)


def dirichlet_bayes_entropy(h: Histogram, S: int, a: float | None = None) -> float:
    """Posterior mean of entropy under a symmetric Dirichlet(a) prior."""
    c, unseen = _full_counts(h, S)
    a = _default_a(h.n, S) if a is None else a
    if not a > 0:
        raise ValueError("Dirichlet parameter a must be positive")
    denom = h.n + S * a
    top = digamma(denom + 1.0)
    terms = (c + a) / denom * (top - digamma(c + a + 1.0))
    extra = unseen * a / denom * (top - digamma(a + 1.0)) if unseen else 0.0
    return math.fsum(terms) + extra


def shrinkage_entropy(h: Histogram, S: int) -> float:
    """Plug-in entropy of the James-Stein shrinkage towards uniform.

    The shrinkage weight is clipped to [0, 1]; when the empirical distribution
    is already uniform on S symbols the denominator vanishes and the weight is 1.
    """
    c, unseen = _full_counts(h, S)
    n = h.n
    if n < 2:
        raise ValueError("shrinkage estimator needs n >= 2")
    p = c / n
    sq = math.fsum(p * p)
    denom = (n - 1) * (sq - 1.0 / S)
    lam = 1.0 if denom <= 0 else min(max((1.0 - sq) / denom, 0.0), 1.0)
    ps = lam / S + (1.0 - lam) * p
    q = lam / S
    return _plugin(ps) + (unseen * -q * math.log(q) if unseen and q > 0 else 0.0)
