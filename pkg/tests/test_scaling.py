"""Closed-form exponents, growth bounds, capacity-ratio rates, and gain
design, checked against exact rational identities and Monte Carlo oracles."""

import math
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from afchain.errors import ConfigError
from afchain.network import (
    ConstantMu,
    ConstantPower,
    GeometricPower,
    LogNormalMu,
    MuList,
    NetworkConfig,
    PowerList,
)
from afchain.scaling import (
    REGIME_BOTH_NONNEG,
    REGIME_BOTH_NONPOS,
    REGIME_BOUNDED,
    REGIME_DIVERGENT,
    REGIME_STRADDLING,
    REGIME_VANISHING,
    build_difference_report,
    design_power_growth,
    exponents_closed_form,
    information_rate,
    information_rate_mc,
    lyap_upper_bounds,
    lyapunov_difference,
    phi_bar_exact,
    power_growth_bounds,
    predict_nu_slope,
    scaling_regime,
    stream_cost,
    term_fixed,
    _report,
)
from afchain.special import digamma_int, harmonic


class TestClosedForm:
    def test_reference_fixed_gain_case(self):
        # d=4, unit powers/fading/noise: L = log(1/8)
        cfg = NetworkConfig(d=4, n=10, gain="fixed")
        rep = exponents_closed_form(cfg)
        assert math.isclose(rep.l_value, math.log(1 / 8), rel_tol=1e-15)
        assert math.isclose(
            rep.lambda_h[0], 0.5 * (math.log(1 / 8) + digamma_int(4)), rel_tol=1e-15
        )
        assert rep.method == "closed-form-fixed"

    def test_derived_families(self):
        cfg = NetworkConfig(d=4, n=10, gain="fixed")
        rep = exponents_closed_form(cfg)
        for lh, lq, lg in zip(rep.lambda_h, rep.lambda_q, rep.lambda_gamma):
            assert lq == max(0.0, lh)
            assert lg == min(0.0, 2.0 * lh)
        assert all(np.diff(rep.lambda_h) < 0)

    @pytest.mark.parametrize("gain", ["fixed", "variable"])
    @pytest.mark.parametrize("d", [2, 3, 4, 8])
    def test_spectrum_gaps_telescope(self, gain, d):
        # lambda_i - lambda_{i+1} = 1/(2(d-i)) regardless of gain or schedules
        cfg = NetworkConfig(d=d, n=10, gain=gain, n0=0.37)
        rep = exponents_closed_form(cfg)
        for i in range(1, d):
            gap = rep.lambda_h[i - 1] - rep.lambda_h[i]
            assert math.isclose(gap, 1.0 / (2 * (d - i)), rel_tol=1e-12)

    def test_variable_quadrature_vs_monte_carlo(self):
        # 1e7-draw Monte Carlo agrees with the quadrature to 4 digits
        cfg = NetworkConfig(d=4, n=10, gain="variable")
        quad = exponents_closed_form(cfg)
        mc = exponents_closed_form(cfg, method="monte-carlo", mc_draws=10_000_000)
        assert mc.method == "monte-carlo-variable"
        assert quad.method == "quadrature-variable"
        assert abs(quad.l_value - mc.l_value) < 1e-4 * max(1.0, abs(quad.l_value))

    def test_lognormal_quadrature_vs_monte_carlo(self):
        cfg = NetworkConfig(
            d=3, n=10, gain="variable", mu_schedule=LogNormalMu(0.0, 2.0)
        )
        quad = exponents_closed_form(cfg)
        mc = exponents_closed_form(cfg, method="monte-carlo", mc_draws=4_000_000)
        assert abs(quad.l_value - mc.l_value) < 2e-3

    def test_fixed_lognormal_quadrature_vs_monte_carlo(self):
        cfg = NetworkConfig(
            d=3, n=10, gain="fixed", mu_schedule=LogNormalMu(0.0, 1.0)
        )
        quad = exponents_closed_form(cfg)
        mc = exponents_closed_form(cfg, method="monte-carlo", mc_draws=4_000_000)
        assert abs(quad.l_value - mc.l_value) < 2e-3

    def test_mu_list_average(self):
        mus = (0.5, 1.0, 2.0)
        cfg = NetworkConfig(d=2, n=3, gain="fixed", mu_schedule=MuList(mus))
        expected = np.mean(
            [term_fixed(0.0, 0.0, 2, m, 1.0) for m in mus]
        )
        assert math.isclose(information_rate(cfg), expected, rel_tol=1e-14)

    def test_geometric_limit_fixed(self):
        cfg = NetworkConfig(
            d=3, n=10, gain="fixed",
            power_schedule=GeometricPower(p0=1.0, growth=1.5),
        )
        assert math.isclose(information_rate(cfg), math.log(1.5 / 3), rel_tol=1e-14)
        # the finite-horizon average converges to the limit from below
        h = information_rate(cfg, horizon=4000)
        assert h < information_rate(cfg)
        assert abs(h - information_rate(cfg)) < 0.01

    def test_geometric_limit_variable(self):
        cfg = NetworkConfig(
            d=3, n=10, gain="variable",
            power_schedule=GeometricPower(p0=1.0, growth=1.5),
        )
        expected = math.log(1.5) + math.log(3) - digamma_int(9)
        assert math.isclose(information_rate(cfg), expected, rel_tol=1e-14)

    def test_geometric_decay_rejected(self):
        cfg = NetworkConfig(
            d=3, n=10, gain="fixed",
            power_schedule=GeometricPower(p0=1.0, growth=0.9),
        )
        with pytest.raises(ConfigError):
            information_rate(cfg)

    def test_unknown_method_rejected(self):
        cfg = NetworkConfig(d=2, n=5, gain="fixed")
        with pytest.raises(ValueError):
            exponents_closed_form(cfg, method="bootstrap")

    def test_as_spectrum(self):
        cfg = NetworkConfig(d=3, n=5, gain="fixed")
        spec = exponents_closed_form(cfg).as_spectrum()
        assert spec.method == "closed-form"
        assert np.all(np.diff(spec.exponents) < 0)


class TestPowerGrowthBounds:
    def test_d1_corrections(self):
        from afchain.special import EULER_GAMMA

        assert math.isclose(math.log(1) - digamma_int(1), EULER_GAMMA)
        assert digamma_int(1) - digamma_int(1) - math.log(1) == 0.0

    def test_corrections_nonnegative_and_ordered(self):
        for d in range(1, 65):
            fixed_corr = math.log(d) - digamma_int(d)
            var_corr = digamma_int(d * d) - digamma_int(d) - math.log(d)
            assert fixed_corr >= 0
            assert var_corr >= -1e-15
            assert fixed_corr >= var_corr - 1e-15

    def test_bounds_zero_in_decaying_regime(self):
        cfg = NetworkConfig(d=4, n=10)
        fixed_b, var_b = power_growth_bounds(cfg)
        # unit powers: top exponent negative, corrections dominated
        assert fixed_b >= 0 and var_b >= 0
        assert fixed_b >= var_b or (fixed_b == 0 and var_b == 0)


class TestLyapUpperBounds:
    def test_noiseless_fixed_equality(self):
        # rho = 0, n0 -> 0: the bound formula is attained exactly
        d = 4
        for j in range(1, d + 1):
            bound = 0.5 * (0.0 - math.log(d) + digamma_int(d - j + 1))
            lam = 0.5 * (term_fixed(0.0, 0.0, d, 1.0, 0.0) + digamma_int(d - j + 1))
            assert math.isclose(bound, lam, rel_tol=1e-14)

    def test_bound_dominates_closed_form(self):
        for gain in ("fixed", "variable"):
            cfg = NetworkConfig(d=3, n=10, gain=gain)
            rep = exponents_closed_form(cfg)
            ubs = lyap_upper_bounds(cfg)
            assert np.all(ubs - np.array(rep.lambda_h) > -1e-12)

    def test_gap_monotone_in_power(self):
        gaps = []
        for p in np.logspace(0, 6, 13):
            cfg = NetworkConfig(
                d=3, n=10, gain="variable", power_schedule=ConstantPower(float(p))
            )
            rep = exponents_closed_form(cfg)
            ub = lyap_upper_bounds(cfg)
            gaps.append(ub[0] - rep.lambda_h[0])
        assert all(g > 0 for g in gaps)
        assert all(b < a for a, b in zip(gaps, gaps[1:]))


class TestLyapunovDifference:
    def test_three_cases(self):
        phi, regime = lyapunov_difference(0.3, 0.1)
        assert phi == 0.0 and regime == REGIME_BOTH_NONNEG
        phi, regime = lyapunov_difference(-0.1, -0.4)
        assert math.isclose(phi, 0.6) and regime == REGIME_BOTH_NONPOS
        phi, regime = lyapunov_difference(0.2, -0.3)
        assert math.isclose(phi, 0.6) and regime == REGIME_STRADDLING

    def test_rejects_unordered(self):
        with pytest.raises(ValueError):
            lyapunov_difference(0.1, 0.3)
        with pytest.raises(ValueError):
            lyapunov_difference(0.1, 0.1)

    @settings(max_examples=200, deadline=None)
    @given(
        st.floats(-3, 3, allow_nan=False),
        st.floats(0.01, 3, allow_nan=False),
    )
    def test_bracket_property(self, lam_j, gap):
        lam_i = lam_j + gap
        phi, regime = lyapunov_difference(lam_i, lam_j)
        phi_bar = 2.0 * (lam_i - lam_j)
        assert -1e-15 <= phi <= phi_bar + 1e-15
        if regime == REGIME_BOTH_NONNEG:
            assert phi == 0.0 and lam_j >= 0
        elif regime == REGIME_BOTH_NONPOS:
            assert math.isclose(phi, phi_bar) and lam_i <= 0
        else:
            assert math.isclose(phi, -2 * lam_j) and lam_i > 0 > lam_j
        # the difference always equals the gamma-family gap
        gamma_i = min(0.0, 2 * lam_i)
        gamma_j = min(0.0, 2 * lam_j)
        assert math.isclose(phi, gamma_i - gamma_j, abs_tol=1e-14)


class TestPhiBar:
    def test_exact_rationals(self):
        assert phi_bar_exact(4, 1, 2) == Fraction(1, 3)
        assert phi_bar_exact(4, 1, 4) == Fraction(11, 6)
        assert phi_bar_exact(4, 1, 4) == harmonic(3) - harmonic(0)

    def test_rejects_bad_indices(self):
        with pytest.raises(ValueError):
            phi_bar_exact(4, 2, 2)
        with pytest.raises(ValueError):
            phi_bar_exact(4, 0, 2)
        with pytest.raises(ValueError):
            phi_bar_exact(4, 1, 5)

    @pytest.mark.parametrize("d", [16, 64, 256])
    @pytest.mark.parametrize("pair", [(1, 2), (1, 3), (2, 4)])
    def test_leading_order_in_antennas(self, d, pair):
        i, j = pair
        val = float(phi_bar_exact(d, i, j))
        assert abs(val - (j - i) / d) <= 8.0 * (j - i) / d**2

    def test_first_last_summand_bracket(self):
        for d in (3, 5, 9, 17):
            for i in range(1, d):
                for j in range(i + 1, d + 1):
                    val = phi_bar_exact(d, i, j)
                    assert Fraction(j - i, d - i) <= val <= Fraction(j - i, d - j + 1)

    def test_difference_report_consistency(self):
        cfg = NetworkConfig(d=4, n=10, gain="fixed")
        rep = exponents_closed_form(cfg)
        diff = build_difference_report(rep)
        for i in range(1, 5):
            for j in range(i + 1, 5):
                assert 0 <= diff.phi[i - 1, j - 1] <= diff.phi_bar[i - 1, j - 1] + 1e-15
                assert diff.phi_bar[i - 1, j - 1] == float(phi_bar_exact(4, i, j))
                # all exponents negative here: upper equality everywhere
                assert diff.regime[i - 1][j - 1] == REGIME_BOTH_NONPOS


def test_separation_rate_independent_of_gain_when_signs_match():
    # with every exponent on the same side of zero, phi depends only on the
    # index gap, not on the amplification strategy
    rep_f = exponents_closed_form(NetworkConfig(d=4, n=10, gain="fixed"))
    rep_v = exponents_closed_form(NetworkConfig(d=4, n=10, gain="variable"))
    assert rep_f.lambda_h[0] < 0 and rep_v.lambda_h[0] < 0
    for i in range(1, 4):
        for j in range(i + 1, 5):
            assert math.isclose(
                predict_nu_slope(rep_f, i, j),
                predict_nu_slope(rep_v, i, j),
                rel_tol=1e-12,
            )


class TestScalingRegime:
    def test_examples(self):
        assert scaling_regime("superlinear", 1, 2) == REGIME_VANISHING
        assert scaling_regime("linear", 1, 2) == REGIME_BOUNDED
        assert scaling_regime("constant", 1, 2) == REGIME_DIVERGENT
        assert scaling_regime("sublinear", 1, 3) == REGIME_DIVERGENT

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            scaling_regime("exponential", 1, 2)
        with pytest.raises(ValueError):
            scaling_regime("linear", 2, 2)


class TestNuSlope:
    def test_adjacent_nonpositive_rate(self):
        # all exponents <= 0: adjacent channels diverge at exactly 1/(d-i)
        cfg = NetworkConfig(d=3, n=10, gain="variable")
        rep = exponents_closed_form(cfg)
        assert rep.lambda_h[0] <= 0
        assert math.isclose(predict_nu_slope(rep, 1, 2), 1.0 / (3 - 1), rel_tol=1e-12)
        assert math.isclose(predict_nu_slope(rep, 2, 3), 1.0 / (3 - 2), rel_tol=1e-12)

    def test_straddling_rate_bounded(self):
        # L = -psi(2) places the middle exponent exactly at zero
        rep = _report(3, "fixed", -digamma_int(2), "closed-form-fixed")
        assert math.isclose(rep.lambda_h[1], 0.0, abs_tol=1e-15)
        rep2 = _report(3, "fixed", -digamma_int(2) + 0.2, "closed-form-fixed")
        # now lambda_2 > 0 > lambda_3: slope = -2 lambda_3 <= 1/(d-2)
        assert rep2.lambda_h[1] > 0 > rep2.lambda_h[2]
        slope = predict_nu_slope(rep2, 2, 3)
        assert math.isclose(slope, -2 * rep2.lambda_h[2], rel_tol=1e-12)
        assert slope <= 1.0 / (3 - 2) + 1e-12

    def test_flat_top_gives_harmonic_spread(self):
        # lambda_1 = 0: the (1, i) ratio slope is H_{d-1} - H_{d-i}
        d = 5
        rep = _report(d, "fixed", -digamma_int(d), "closed-form-fixed")
        assert math.isclose(rep.lambda_h[0], 0.0, abs_tol=1e-15)
        for i in range(2, d + 1):
            slope = predict_nu_slope(rep, 1, i)
            expected = float(harmonic(d - 1) - harmonic(d - i))
            assert math.isclose(slope, expected, rel_tol=1e-12)
            assert (i - 1) / (d - 1) <= slope + 1e-12
            assert slope <= (i - 1) / (d - i + 1) + 1e-12

    def test_rejects_bad_pairs(self):
        rep = _report(3, "fixed", -1.0, "closed-form-fixed")
        with pytest.raises(ValueError):
            predict_nu_slope(rep, 2, 2)
        with pytest.raises(ValueError):
            predict_nu_slope(rep, 1, 4)


class TestStreamCost:
    def test_reference_value(self):
        assert math.isclose(stream_cost(4, 1, 10), math.exp(10 / 3), rel_tol=1e-15)

    def test_monotone_in_index(self):
        for n in (1, 10, 100):
            costs = [stream_cost(6, i, n) for i in range(1, 6)]
            assert all(b > a for a, b in zip(costs, costs[1:]))

    def test_large_antenna_limit(self):
        assert math.isclose(stream_cost(10_000_000, 1, 10), 1.0, rel_tol=1e-5)

    def test_rejects_exhausted_streams(self):
        with pytest.raises(ValueError):
            stream_cost(4, 4, 10)
        with pytest.raises(ValueError):
            stream_cost(4, 0, 10)


class TestDesignPowerGrowth:
    def test_noiseless_closed_form(self):
        for d, i in ((2, 1), (4, 1), (4, 2)):
            g = design_power_growth(d, 1.0, 0.0, "fixed", i)
            assert math.isclose(
                g, d * math.exp(-digamma_int(d - i + 1)), rel_tol=1e-10
            )

    def test_asymptotic_initializer_consistency(self):
        # vanishing noise floor: log g -> log d - psi(d)
        g = design_power_growth(4, 1.0, 1e-9, "fixed", 1)
        assert abs(math.log(g) - (math.log(4) - digamma_int(4))) < 1e-6

    def test_self_consistency_with_closed_form(self):
        g = design_power_growth(4, 1.0, 1.0, "fixed", 1, horizon=1000)
        cfg = NetworkConfig(
            d=4, n=10, gain="fixed",
            power_schedule=GeometricPower(p0=1.0, growth=g),
        )
        rep_h = information_rate(cfg, horizon=1000)
        lam1 = 0.5 * (rep_h + digamma_int(4))
        assert abs(lam1) < 1e-9

    def test_variable_needs_less_growth(self):
        gf = design_power_growth(3, 1.0, 1.0, "fixed", 1, horizon=400)
        gv = design_power_growth(3, 1.0, 1.0, "variable", 1, horizon=400)
        assert gv <= gf

    def test_reports_infeasible_bracket(self):
        with pytest.raises(ValueError) as exc:
            design_power_growth(3, 1.0, 1.0, "fixed", 3, bracket_factor=1.001)
        assert "feasible" in str(exc.value)
