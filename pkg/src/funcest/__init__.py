"""Estimators of entropy, power sums and Renyi entropy on large alphabets."""

from .approx import NegXLogX, PowerAlpha, cached_approx, eval_poly, remez, window_coeffs
from .baselines import (
    Known,
    Observed,
    cae_entropy,
    digamma,
    dirichlet_bayes_entropy,
    dirichlet_plugin_entropy,
    grassberger_entropy,
    jackknife_entropy,
    miller_madow,
    mle_entropy,
    shrinkage_entropy,
)
from .composite import PairHistogram, estimate_entropy_rate, estimate_mi, marginalize
from .estimators import (
    EstimatorConfig,
    Histogram,
    estimate_entropy,
    estimate_falpha,
    estimate_renyi,
    histogram_from_samples,
)
from .graphical import TreeModel, chow_liu, mwst, wrong_edges_ratio

__version__ = "0.1.0"
