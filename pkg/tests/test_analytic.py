import math
import warnings

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import erfcx

from patchyrx import (ChannelParams, asymptotic_fraction_uniform, capacitance,
                      cumulative_fraction_uniform, effective_channel, fibonacci_layout,
                      hitting_rate_uniform, multi_patch_cir, random_layout)
from patchyrx.analytic import (DerivedCoefficients, erfcx_divided_difference, erfcx_gap,
                               fully_absorbing_density)

from oracles import (REFERENCE, first_passage_density, fully_absorbing_fraction,
                     integrated_hitting_rate, literal_cumulative, literal_hitting_rate, zeta_root)

DEFAULTS = ChannelParams.paper_defaults()
W_E11 = None


def w_e11():
    global W_E11
    if W_E11 is None:
        W_E11 = effective_channel(fibonacci_layout(11, 0.05, 10.0), DEFAULTS.D_sigma).w_e
    return W_E11


class TestSpecialFunctions:
    def test_erfcx_table(self):
        x = np.array([row[0] for row in REFERENCE["erfcx"]])
        ref = np.array([float(row[1]) for row in REFERENCE["erfcx"]])
        assert np.max(np.abs(erfcx(x) / ref - 1)) < 1e-10

    @pytest.mark.parametrize("x", [0.0, 0.3, 2.0, 7.99, 8.0, 8.01, 20.0, 1e3, 1e8])
    def test_gap(self, x):
        with mp.workdps(50):
            ref = float(1 / mp.sqrt(mp.pi) - x * mp.exp(mp.mpf(x) ** 2) * mp.erfc(x))
        assert erfcx_gap(np.array([x]))[0] == pytest.approx(ref, rel=1e-12)

    @pytest.mark.parametrize("y,h", [(0.5, 1e-9), (3.0, 1e-5), (3.0, 0.2), (50.0, -1e-3),
                                     (1e4, 2.0), (0.0, 0.0), (2.0, -1.5)])
    def test_divided_difference(self, y, h):
        with mp.workdps(60):
            f = lambda v: mp.exp(mp.mpf(v) ** 2) * mp.erfc(v)  # noqa: E731
            ref = float(mp.diff(f, y) if h == 0 else (f(mp.mpf(y) + h) - f(y)) / h)
        assert erfcx_divided_difference(y, h) == pytest.approx(ref, rel=1e-10)


class TestHittingRate:
    def test_zero_rate(self):
        assert hitting_rate_uniform(np.array([0.1, 1.0, 10.0]), 0.0, DEFAULTS).tolist() == [0, 0, 0]

    def test_vanishes_at_small_time(self):
        assert hitting_rate_uniform(1e-4, 5.0, DEFAULTS) < 1e-100

    @pytest.mark.parametrize("t", [0.01, 0.1, 1.0])
    def test_degradation_factorization(self, t):
        with_kd = hitting_rate_uniform(t, 5.0, DEFAULTS)
        without = hitting_rate_uniform(t, 5.0, ChannelParams.paper_defaults(k_d=0.0))
        assert with_kd == pytest.approx(without * math.exp(-0.8 * t), rel=1e-12)

    @pytest.mark.parametrize("w", [0.03, 1.0, 5.7, 200.0])
    @pytest.mark.parametrize("t", [0.02, 0.3, 2.0, 15.0])
    def test_matches_high_precision_form(self, w, t):
        assert hitting_rate_uniform(t, w, DEFAULTS) == pytest.approx(
            literal_hitting_rate(t, w, DEFAULTS), rel=1e-11)

    def test_fully_absorbing_limit(self):
        p = ChannelParams.paper_defaults(k_d=0.0)
        t = np.linspace(0.05, 2.0, 200)
        ref = np.array([first_passage_density(s, p) for s in t])
        assert np.max(np.abs(hitting_rate_uniform(t, 1e6, p) / ref - 1)) < 1e-3
        assert np.allclose(fully_absorbing_density(t, p), ref, rtol=1e-13)

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            hitting_rate_uniform(0.0, 1.0, DEFAULTS)
        with pytest.raises(ValueError):
            hitting_rate_uniform(1.0, -1.0, DEFAULTS)

    def test_array_shape(self):
        out = hitting_rate_uniform(np.ones((3, 4)), 2.0, DEFAULTS)
        assert out.shape == (3, 4)


class TestCumulative:
    def test_zero_rate(self):
        assert cumulative_fraction_uniform(3.0, 0.0, DEFAULTS) == 0.0

    def test_quadrature_at_effective_rate(self):
        w = w_e11()
        assert abs(cumulative_fraction_uniform(2.0, w, DEFAULTS) - integrated_hitting_rate(2.0, w, DEFAULTS)) < 1e-7

    @pytest.mark.parametrize("w", [0.01, 0.5, 5.7, 80.0, 1e4])
    @pytest.mark.parametrize("t", [0.05, 0.5, 3.0, 40.0])
    def test_matches_high_precision_form(self, w, t):
        got = cumulative_fraction_uniform(t, w, DEFAULTS)
        ref = literal_cumulative(t, w, DEFAULTS)
        assert got == pytest.approx(ref, rel=1e-10, abs=1e-300)

    def test_zeta_crossing_is_continuous(self):
        w0 = zeta_root(DEFAULTS)
        assert DerivedCoefficients.of(w0, DEFAULTS).zeta == pytest.approx(0.0, abs=1e-12)
        for t in (0.1, 1.0, 10.0):
            vals = [cumulative_fraction_uniform(t, w0 * (1 + d), DEFAULTS) for d in (-1e-6, 0.0, 1e-6)]
            ref = literal_cumulative(t, w0 * (1 + 1e-3), DEFAULTS)
            assert vals[1] == pytest.approx(integrated_hitting_rate(t, w0, DEFAULTS), abs=1e-12)
            # H is nearly linear in w here, so a 2e-6 step in w moves it by about 2e-6
            assert abs(vals[0] - vals[2]) < 2.5e-6 * vals[1]
            assert vals[0] < vals[1] < vals[2]
            assert vals[1] == pytest.approx(ref, rel=2e-3)

    def test_long_time_limit(self):
        w = w_e11()
        assert abs(cumulative_fraction_uniform(50.0, w, DEFAULTS) - asymptotic_fraction_uniform(w, DEFAULTS)) < 1e-6

    def test_fully_absorbing_cumulative(self):
        p = ChannelParams.paper_defaults(k_d=0.0)
        for t in (0.1, 1.0, 20.0):
            assert cumulative_fraction_uniform(t, 1e9, p) == pytest.approx(
                fully_absorbing_fraction(t, p), rel=1e-5)

    @settings(max_examples=200, deadline=None)
    @given(w=st.one_of(st.just(0.0), st.floats(1e-6, 1e9)), t=st.floats(1e-4, 1e3),
           kd=st.one_of(st.just(0.0), st.floats(1e-6, 1e2)))
    def test_numerically_stable(self, w, t, kd):
        p = ChannelParams.paper_defaults(k_d=kd)
        h = hitting_rate_uniform(t, w, p)
        H = cumulative_fraction_uniform(t, w, p)
        Hinf = asymptotic_fraction_uniform(w, p)
        assert math.isfinite(h) and h >= 0
        assert math.isfinite(H) and 0 <= H <= 1
        assert H <= Hinf * (1 + 1e-9) + 1e-300

    @settings(max_examples=50, deadline=None)
    @given(w=st.floats(1e-3, 1e6), kd=st.floats(0.0, 5.0))
    def test_monotone_in_time(self, w, kd):
        p = ChannelParams.paper_defaults(k_d=kd)
        H = cumulative_fraction_uniform(np.geomspace(1e-3, 1e3, 400), w, p)
        assert np.all(np.diff(H) >= -1e-15)


class TestAsymptotic:
    def test_zero(self):
        assert asymptotic_fraction_uniform(0.0, DEFAULTS) == 0.0

    def test_fully_absorbing(self):
        p = ChannelParams.paper_defaults(k_d=0.0)
        assert asymptotic_fraction_uniform(1e12, p) == pytest.approx(0.5, rel=1e-9)

    def test_against_long_horizon(self):
        w = w_e11()
        assert abs(asymptotic_fraction_uniform(w, DEFAULTS) - cumulative_fraction_uniform(100.0, w, DEFAULTS)) < 1e-6

    def test_no_degradation_closed_form(self):
        p = ChannelParams.paper_defaults(k_d=0.0)
        for w in (0.1, 7.0, 300.0):
            # radiation boundary without decay: r_R^2 w / (r_0 (D + w r_R))
            assert asymptotic_fraction_uniform(w, p) == pytest.approx(
                p.r_R**2 * w / (p.r_0 * (p.D_sigma + w * p.r_R)), rel=1e-13)

    def test_high_precision_limit(self):
        for w in (0.02, 3.0, 500.0):
            with mp.workdps(40):
                D, k, rR, r0 = map(mp.mpf, (79.4, 0.8, 10, 20))
                g = (w * rR + D) / (D * rR)
                beta = (r0 - rR) * mp.sqrt(k / D)
                ref = float(rR * w / r0 * mp.exp(-beta) / (mp.sqrt(k * D) + g * D))
            assert asymptotic_fraction_uniform(w, DEFAULTS) == pytest.approx(ref, rel=1e-13)


class TestMultiPatch:
    def test_no_degradation_limit_is_capacitance_ratio(self):
        p = ChannelParams.paper_defaults(k_d=0.0)
        for seed in range(5):
            lay = random_layout(9, 0.08, 10.0, seed=seed)
            r = multi_patch_cir([1.0], lay, p)
            assert r.H_p_inf == pytest.approx(capacitance(lay) / p.r_0, rel=1e-10)

    def test_uses_effective_rate(self):
        lay = fibonacci_layout(11, 0.05, 10.0)
        t = np.array([0.1, 0.5, 2.0])
        r = multi_patch_cir(t, lay, DEFAULTS)
        assert np.array_equal(r.h_p, hitting_rate_uniform(t, r.w_e, DEFAULTS))
        assert np.array_equal(r.H_p, cumulative_fraction_uniform(t, r.w_e, DEFAULTS))

    def test_more_patches_absorb_more(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            vals = [multi_patch_cir([2.0], fibonacci_layout(n, 0.05, 10.0), DEFAULTS).H_p[0]
                    for n in (1, 3, 5, 7, 9, 11)]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_layout_radius_must_match(self):
        with pytest.raises(ValueError):
            multi_patch_cir([1.0], fibonacci_layout(3, 0.05, 5.0), DEFAULTS)
