import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from funcest.approx import NegXLogX, PowerAlpha, WindowedCoeffs, cached_approx, window_coeffs
from funcest.estimators import (
    EstimatorConfig,
    Histogram,
    estimate_entropy,
    estimate_falpha,
    estimate_renyi,
    histogram_from_samples,
    interp_window,
    regime_counts,
    s_poly_eval,
    thresholds,
)
from funcest.synth import make_rng, sample_multinomial, true_entropy, zipf_dist


def unit(k, K=None):
    c = np.zeros((K or k) + 1)
    c[k] = 1.0
    return WindowedCoeffs(coeffs=c, window=1.0, shift=False)


class TestHistogram:
    def test_from_samples(self):
        h = histogram_from_samples("aba")
        assert h.counts == {"a": 2, "b": 1} and h.n == 3
        assert histogram_from_samples(["a"]).n == 1
        assert histogram_from_samples(["a"] * 1000).counts == {"a": 1000}

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            histogram_from_samples([])

    def test_zeros_dropped_negatives_rejected(self):
        h = Histogram.from_counts([0, 3, 0, 1])
        assert h.counts == {1: 3, 3: 1} and h.support == 2
        with pytest.raises(ValueError):
            Histogram({"a": -1, "b": 2})


class TestThresholds:
    def test_reference_point(self):
        th = thresholds(10_000, EstimatorConfig(c1=0.1, c2=0.7))
        assert th.delta == pytest.approx(9.2103e-5, rel=1e-4)
        assert th.K == 7
        assert th.t == pytest.approx(2.3026e-5, rel=1e-4)

    def test_unit_c1(self):
        assert thresholds(8, EstimatorConfig(c1=1)).delta == pytest.approx(math.log(8) / 8)

    def test_degree_floor(self):
        assert thresholds(2, EstimatorConfig(c2=0.7, k_min=1)).K == 1

    def test_small_n(self):
        with pytest.raises(ValueError):
            thresholds(1)

    @pytest.mark.parametrize("kw", [dict(c1=0), dict(c1=10.5), dict(c2=0), dict(k_min=0)])
    def test_bad_config(self, kw):
        with pytest.raises(ValueError):
            EstimatorConfig(**kw)


class TestInterpWindow:
    def test_anchor_values(self):
        t = 0.01
        assert interp_window(t, t) == 0.0
        assert interp_window(2 * t, t) == 1.0
        assert interp_window(1.5 * t, t) == pytest.approx(0.5, abs=1e-15)
        assert interp_window(0.0, t) == 0.0 and interp_window(1.0, t) == 1.0

    def test_blend_is_c4_at_joins(self):
        t = 0.3
        u = np.polynomial.Polynomial([0, 0, 0, 0, 0, 126, -420, 540, -315, 70])
        x = np.linspace(t, 2 * t, 41)
        np.testing.assert_allclose(interp_window(x, t), u((x - t) / t), atol=1e-14)
        for k in range(1, 5):
            d = u.deriv(k)
            assert abs(d(0.0)) < 1e-9 and abs(d(1.0)) < 1e-9

    @given(st.floats(0, 1), st.floats(0, 1))
    def test_monotone(self, a, b):
        lo, hi = sorted((a, b))
        assert interp_window(lo, 0.2) <= interp_window(hi, 0.2)

    def test_rejects_bad_t(self):
        with pytest.raises(ValueError):
            interp_window(0.1, 0.0)


class TestSPoly:
    def test_examples(self):
        w = WindowedCoeffs(coeffs=np.array([0.3, 1.0, 2.0]), window=1.0, shift=False)
        assert s_poly_eval(0, 10, w, keep_constant_term=False) == 0.0
        assert s_poly_eval(3, 10, unit(1)) == pytest.approx(0.3)
        assert s_poly_eval(2, 4, unit(2)) == pytest.approx(0.125)

    @pytest.mark.parametrize("p", [0.01, 0.1])
    @pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
    def test_poisson_unbiased(self, p, k):
        n = 1000
        lam = n * p
        xmax = int(stats.poisson.isf(1e-16, lam)) + 10
        x = np.arange(xmax + 1)
        pmf = stats.poisson.pmf(x, lam)
        assert stats.poisson.sf(xmax, lam) < 1e-12
        mean = math.fsum(pmf * s_poly_eval(x, n, unit(k)))
        assert mean == pytest.approx(p**k, rel=1e-9)


class TestEntropy:
    def test_single_symbol(self):
        n = 5000
        assert estimate_entropy(Histogram({"a": n})) == pytest.approx(1 / (2 * n), rel=1e-12)

    def test_smooth_closed_form(self):
        counts = [400, 300, 200, 100]
        h = Histogram.from_counts(counts)
        th = thresholds(h.n)
        p = np.array(counts) / h.n
        assert p.min() > max(2 * th.delta, 2 * th.t)
        expect = math.fsum(-p * np.log(p)) + len(p) / (2 * h.n)
        assert estimate_entropy(h) == pytest.approx(expect, rel=1e-14)

    def test_monte_carlo_two_symbols(self):
        vals = [estimate_entropy(sample_multinomial([0.5, 0.5], 10**6, make_rng(1, i)))
                for i in range(20)]
        assert abs(np.mean(vals) - math.log(2)) < 0.01

    def test_rejects_single_observation(self):
        with pytest.raises(ValueError):
            estimate_entropy(Histogram({"a": 1}))

    def test_boundary_goes_to_polynomial_regime(self):
        # a count at the largest integer not exceeding 2*delta*n
        cfg = EstimatorConfig(c1=0.5)
        n = 1000
        th = thresholds(n, cfg)
        c = 2 * th.delta * n
        h = Histogram({"a": int(c), "b": n - int(c)})
        diag = regime_counts(h, cfg)
        assert diag["nonsmooth"] == 1

    def test_regime_diagnostics(self):
        h = Histogram({"a": 1, "b": 1, "c": 998})
        diag = {}
        estimate_entropy(h, EstimatorConfig(), diag)
        assert diag["nonsmooth"] == 2 and diag["smooth"] == 1
        assert diag["degree"] == math.ceil(0.7 * math.log(1000))

    def test_consistency(self):
        p = zipf_dist(100)
        H = true_entropy(p)

        def rmse(n):
            e = [estimate_entropy(sample_multinomial(p, n, make_rng(4, n, i))) - H
                 for i in range(20)]
            return math.sqrt(np.mean(np.square(e)))

        assert rmse(10**6) < rmse(10**3)

    def test_split_mode_is_seeded(self):
        h = sample_multinomial(zipf_dist(50), 2000, make_rng(3))
        a = estimate_entropy(h, EstimatorConfig(split=True, seed=5))
        b = estimate_entropy(h, EstimatorConfig(split=True, seed=5))
        assert a == b
        assert abs(a - true_entropy(zipf_dist(50))) < 0.2

    def test_constant_term_switch(self):
        h = sample_multinomial(zipf_dist(200), 300, make_rng(8))
        on = estimate_entropy(h, EstimatorConfig(keep_constant_term=True), d1 := {})
        off = estimate_entropy(h, EstimatorConfig(keep_constant_term=False))
        th = thresholds(h.n)
        w = window_coeffs(cached_approx(NegXLogX(), th.K), NegXLogX(), th.delta)
        assert on - off == pytest.approx(d1["nonsmooth"] * w.coeffs[0], abs=1e-12)

    def test_deterministic(self):
        h = sample_multinomial(zipf_dist(300), 700, make_rng(2))
        assert estimate_entropy(h) == estimate_entropy(h)


class TestFalpha:
    def test_single_symbol(self):
        n = 4000
        assert estimate_falpha(Histogram({"a": n}), 2) == pytest.approx(1 - 1 / n, rel=1e-14)

    def test_monte_carlo_two_symbols(self):
        vals = [estimate_falpha(sample_multinomial([0.5, 0.5], 10**6, make_rng(2, i)), 2)
                for i in range(20)]
        assert abs(np.mean(vals) - 0.5) < 0.01

    def test_cap(self):
        cfg = EstimatorConfig(c1=1, c2=3)
        th = thresholds(8, cfg)
        w = window_coeffs(cached_approx(PowerAlpha(0.5), th.K), PowerAlpha(0.5), th.delta)
        assert s_poly_eval(4, 8, w) > 1
        diag = {}
        assert estimate_falpha(Histogram({"a": 4, "b": 4}), 0.5, cfg, diag) == 2.0
        assert diag["capped"] == 2

    @pytest.mark.parametrize("alpha", [0, -1, 1])
    def test_bad_alpha(self, alpha):
        with pytest.raises(ValueError):
            estimate_falpha(Histogram({"a": 3, "b": 4}), alpha)


class TestRenyi:
    def test_single_symbol(self):
        n = 4000
        got = estimate_renyi(Histogram({"a": n}), 2)
        assert got == pytest.approx(-math.log(1 - 1 / n), rel=1e-12)

    def test_forced_clamp(self):
        cfg = EstimatorConfig(renyi_floor=2.0)
        diag = {}
        got = estimate_renyi(Histogram({"a": 10, "b": 10}), 2, cfg, diag)
        assert diag["clamped"] and got == pytest.approx(-math.log(2.0))


counts_strategy = st.lists(st.integers(1, 60), min_size=1, max_size=40).filter(
    lambda c: sum(c) >= 2)


@settings(max_examples=60, deadline=None)
@given(counts_strategy, st.randoms(use_true_random=False))
def test_label_invariance(counts, rnd):
    h = Histogram(dict(enumerate(counts)))
    labels = list(range(len(counts)))
    rnd.shuffle(labels)
    g = Histogram({f"s{labels[i]}": c for i, c in enumerate(counts)})
    assert estimate_entropy(h) == estimate_entropy(g)
    assert estimate_falpha(h, 0.7) == estimate_falpha(g, 0.7)


@settings(max_examples=60, deadline=None)
@given(counts_strategy, st.sampled_from([0.25, 0.5, 0.75, 1.5, 2.0]))
def test_cap_per_symbol(counts, alpha):
    h = Histogram(dict(enumerate(counts)))
    diag = {}
    total = estimate_falpha(h, alpha, EstimatorConfig(c1=1, c2=2), diag)
    # nonsmooth contributions are at most 1, smooth ones at most (1 + 1/(8n)) p^alpha
    assert total <= diag["nonsmooth"] + diag["smooth"] * (1 + 1 / h.n) + 1e-12


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(50, 500), min_size=1, max_size=6))
def test_smooth_reduction(counts):
    h = Histogram(dict(enumerate(counts)))
    th = thresholds(h.n)
    p = np.array(counts) / h.n
    if p.min() <= max(2 * th.delta, 2 * th.t):
        return
    expect = math.fsum(-p * np.log(p)) + len(p) / (2 * h.n)
    assert estimate_entropy(h) == pytest.approx(expect, rel=1e-12, abs=1e-15)
