"""Name-based lookup of entropy estimators, shared by the CLI and the bench."""

from __future__ import annotations

import math
from functools import partial

from . import baselines as bl
from .estimators import EstimatorConfig, Histogram, estimate_entropy, estimate_falpha

ENTROPY_METHODS = ("mle", "mm", "jk", "cae", "grassberger", "dirichlet", "bayes",
                   "shrinkage", "jvhw")
FALPHA_METHODS = ("mle", "jvhw")


def _support(h, S):
    return h.support if S is None else max(int(S), h.support)


def entropy_method(name: str, support: int | None = None, a: float | None = None,
                   cfg: EstimatorConfig | None = None):
    """Return ``f(Histogram) -> float`` for the named estimator.

    ``support`` is the alphabet size handed to estimators that need one; when
    it is None (or smaller than what was observed) the observed support is used.
    """
    cfg = cfg or EstimatorConfig()
    if name == "mle":
        return bl.mle_entropy
    if name == "mm":
        return lambda h: bl.miller_madow(h, bl.Known(_support(h, support)))
    if name == "jk":
        return bl.jackknife_entropy
    if name == "cae":
        return bl.cae_entropy
    if name == "grassberger":
        return bl.grassberger_entropy
    if name == "dirichlet":
        return lambda h: bl.dirichlet_plugin_entropy(h, _support(h, support), a)
    if name == "bayes":
        return lambda h: bl.dirichlet_bayes_entropy(h, _support(h, support), a)
    if name == "shrinkage":
        return lambda h: bl.shrinkage_entropy(h, _support(h, support))
    if name == "jvhw":
        return partial(estimate_entropy, cfg=cfg)
    raise KeyError(f"unknown entropy method {name!r}; choose from {', '.join(ENTROPY_METHODS)}")


def plugin_falpha(h: Histogram, alpha: float) -> float:
    p = h.values / h.n
    return math.fsum(p**alpha)


def falpha_method(name: str, alpha: float, cfg: EstimatorConfig | None = None):
    cfg = cfg or EstimatorConfig()
    if name == "mle":
        return lambda h: plugin_falpha(h, alpha)
    if name == "jvhw":
        return lambda h: estimate_falpha(h, alpha, cfg)
    raise KeyError(f"unknown power-sum method {name!r}; choose from {', '.join(FALPHA_METHODS)}")
