import json
import math
import warnings
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

import oracles
from seqfuse import analysis
from seqfuse.analysis import (
    EpochTable,
    asymptotic_constants,
    bayes_risk_constant,
    csprt_edd_approx,
    csprt_epochs,
    csprt_noise_increment,
    csprt_pmd_approx,
    dualsprt_edd_approx,
    dualsprt_epochs,
    dualsprt_pmd_bounds,
    fredholm_lambda,
    legendre_rate,
    node_passage_distributions,
    order_statistic_means,
    theorem2_check_gaussian,
)
from seqfuse.cli import PRESETS, scenario_from_dict
from seqfuse.distributions import GaussianModel, Hypothesis, PassageDistribution
from seqfuse.errors import NumericError

H0, H1 = Hypothesis.H0, Hypothesis.H1


class TestOrderStatisticMeans:
    def test_single_distribution_is_identity(self):
        got = order_statistic_means([PassageDistribution(20.0, 80.0)])
        assert got[0] == pytest.approx(20.0, rel=1e-9)

    def test_near_degenerate_components(self):
        dists = [PassageDistribution(10.0, 1e-8)] * 3
        assert_allclose(order_statistic_means(dists), [10.0] * 3, atol=1e-3)

    def test_iid_case_against_sampling(self):
        dists = [PassageDistribution(10.0, 10.0)] * 5
        got = order_statistic_means(dists)
        want = oracles.sampled_order_stat_means(dists, 400_000, seed=3)
        assert_allclose(got, want, rtol=0.01)

    def test_heterogeneous_case_against_sampling(self):
        dists = [
            PassageDistribution(20.0, 80.0),
            PassageDistribution(28.3, 160.0),
            PassageDistribution(35.6, 287.0),
            PassageDistribution(50.4, 812.0),
            PassageDistribution(80.0, 3276.0),
        ]
        got = order_statistic_means(dists)
        want = oracles.sampled_order_stat_means(dists, 400_000, seed=4)
        assert_allclose(got, want, rtol=0.02)
        assert all(a < b for a, b in zip(got, got[1:]))

    def test_narrow_window_is_detected(self):
        with pytest.raises(NumericError):
            order_statistic_means([PassageDistribution(20.0, 80.0)], tail_sigmas=0.3)


E1_TIMES = (
    9.598129526089155,
    15.572415727617175,
    19.999999999999197,
    24.427584272381218,
    30.40187047390937,
)
E1_DRIFTS = (0.4, 0.8, 1.2, 1.6, 2.0)
E1_FBAR = (
    0.0,
    2.3897144806112083,
    5.931781898516826,
    11.244883025375252,
    20.803740947820295,
)
E1_FBAR_VERBATIM = (
    3.839251810435662,
    8.618680771658079,
    13.931781898516507,
    21.01591673432774,
    32.96448913738404,
)


class TestDualSprtEpochs:
    def test_reference_table(self, example1):
        table = dualsprt_epochs(example1, H1)
        assert_allclose(table.times, E1_TIMES, rtol=1e-9)
        assert_allclose(table.drifts, E1_DRIFTS, rtol=1e-12)
        assert_allclose(table.fbar, E1_FBAR, rtol=1e-9, atol=1e-12)
        assert table.drift_before == 0.0
        assert table.convention == "segment"

    def test_h0_table_mirrors(self, example1):
        up = dualsprt_epochs(example1, H1)
        down = dualsprt_epochs(example1, H0)
        assert_allclose(down.times, up.times, rtol=1e-12)
        assert_allclose(down.drifts, [-d for d in up.drifts], rtol=1e-12)
        assert_allclose(down.fbar, [-f for f in up.fbar], rtol=1e-9, atol=1e-12)

    def test_verbatim_convention(self, example1):
        table = dualsprt_epochs(example1, H1, convention="verbatim")
        assert_allclose(table.fbar, E1_FBAR_VERBATIM, rtol=1e-9)

    def test_epochs_property_rows(self, example1):
        rows = dualsprt_epochs(example1, H1).epochs
        assert rows[0] == pytest.approx((E1_TIMES[0], 0.4, 0.0))
        assert len(rows) == 5

    def test_recursion_is_enforced_on_construction(self, example1):
        table = dualsprt_epochs(example1, H1)
        with pytest.raises(ValueError):
            EpochTable(
                times=table.times,
                drifts=table.drifts,
                fbar=tuple(v + 0.5 for v in table.fbar),
                drift_before=table.drift_before,
                hypothesis=table.hypothesis,
            )

    def test_validate_passes_on_good_table(self, example1):
        dualsprt_epochs(example1, H1).validate()
        dualsprt_epochs(example1, H1, convention="verbatim").validate()

    def test_unknown_convention_rejected(self, example1):
        with pytest.raises(ValueError):
            dualsprt_epochs(example1, H1, convention="midpoint")

    def test_fading_scenario_rejected(self, glr_fading):
        with pytest.raises(ValueError):
            node_passage_distributions(glr_fading, H1)

    def test_gain_shifts_data_not_the_test(self):
        doc = PRESETS["example1"]()
        doc["channel"]["gains"] = [2.0, 1.0, 1.0, 1.0, 1.0]
        boosted = scenario_from_dict(doc)
        dists = node_passage_distributions(boosted, H1)
        # node 0 still scores llr(x) = x - 1/2 but its data mean doubles,
        # so the drift is 2 - 1/2 and the passage mean 10 / 1.5
        assert dists[0].mean == pytest.approx(10.0 / 1.5, rel=1e-12)
        assert dists[1].mean == pytest.approx(20.0, rel=1e-12)
        under_h0 = node_passage_distributions(boosted, H0)
        assert under_h0[0].mean == pytest.approx(20.0, rel=1e-12)


EDD_SEGMENT = {
    5.0: 18.835272626853165,
    10.0: 23.390181751235176,
    15.0: 26.774532381521684,
    20.0: 29.899532381521684,
    25.0: 32.49999999999922,
}


class TestDualSprtEdd:
    @pytest.mark.parametrize("beta,want", sorted(EDD_SEGMENT.items()))
    def test_reference_values(self, example1, beta, want):
        table = dualsprt_epochs(example1, H1)
        assert dualsprt_edd_approx(table, beta) == pytest.approx(want, rel=1e-9)

    def test_verbatim_reference_value(self, example1):
        table = dualsprt_epochs(example1, H1, convention="verbatim")
        assert dualsprt_edd_approx(table, 5.0) == pytest.approx(12.5, rel=1e-9)

    def test_h0_side_is_symmetric_here(self, example1):
        table = dualsprt_epochs(example1, H0)
        assert dualsprt_edd_approx(table, 10.0) == pytest.approx(
            EDD_SEGMENT[10.0], rel=1e-9
        )

    def test_tiny_threshold_stops_in_first_segment(self, example1):
        table = dualsprt_epochs(example1, H1)
        val = dualsprt_edd_approx(table, 1e-9)
        assert val == pytest.approx(table.times[0], rel=1e-6)

    def test_huge_threshold_extends_last_segment(self, example1):
        table = dualsprt_epochs(example1, H1)
        beta = 200.0
        want = table.times[-1] + (beta - table.fbar[-1]) / table.drifts[-1]
        assert dualsprt_edd_approx(table, beta) == pytest.approx(want, rel=1e-12)

    @given(betas=st.lists(st.floats(0.1, 120.0), min_size=2, max_size=8))
    @settings(max_examples=40, deadline=None)
    def test_nondecreasing_in_beta(self, betas):
        table = dualsprt_epochs(
            scenario_from_dict(PRESETS["example1"]()), H1
        )
        betas = sorted(betas)
        vals = [dualsprt_edd_approx(table, b) for b in betas]
        assert all(a <= b + 1e-9 for a, b in zip(vals, vals[1:]))

    def test_degenerate_single_epoch_table(self):
        table = EpochTable(
            times=(12.0,), drifts=(1.5,), fbar=(0.0,), drift_before=0.0, hypothesis=H1
        )
        assert dualsprt_edd_approx(table, 3.0) == pytest.approx(12.0 + 3.0 / 1.5)


PMD_BOUNDS = {
    5.0: (0.06479200318290043, 0.06732998256163703),
    10.0: (0.0014559292212816325, 0.0014590700299521727),
    15.0: (1.2700596647898479e-05, 1.2701539328235835e-05),
}


class TestDualSprtPmdBounds:
    @pytest.mark.parametrize("beta,want", sorted(PMD_BOUNDS.items()))
    def test_reference_values(self, example1, beta, want):
        lo, up = dualsprt_pmd_bounds(example1, beta)
        assert lo == pytest.approx(want[0], rel=1e-6)
        assert up == pytest.approx(want[1], rel=1e-6)

    @pytest.mark.parametrize("beta", [0.5, 2.0, 5.0, 10.0, 40.0])
    def test_ordering_and_range(self, example1, beta):
        lo, up = dualsprt_pmd_bounds(example1, beta)
        assert 0.0 <= lo <= up <= 1.0

    def test_symmetric_scenario_has_equal_error_laws(self, example1):
        assert dualsprt_pmd_bounds(example1, 10.0, hypothesis=H1) == pytest.approx(
            dualsprt_pmd_bounds(example1, 10.0, hypothesis=H0)
        )

    def test_deep_threshold_vanishes(self, example1):
        lo, up = dualsprt_pmd_bounds(example1, 1000.0)
        assert up < 1e-10

    def test_biased_pre_transmission_increments_rejected(self):
        doc = PRESETS["example1"]()
        doc["fusion"]["mu0"] = 0.5
        with pytest.raises(ValueError):
            dualsprt_pmd_bounds(scenario_from_dict(doc), 5.0)

    def test_explicit_short_series_warns(self, example1):
        with pytest.warns(UserWarning):
            dualsprt_pmd_bounds(example1, 5.0, k_max=5)


FIG3_TIMES_HEAD = (
    14.327974028916351,
    15.327974028916351,
    16.32797402891635,
    17.32797402891635,
)
FIG3_FBAR_HEAD = (0.0, 0.1, 0.4, 0.9000000000000001)


class TestCsprtEpochs:
    def test_reference_table_shape(self, fig3):
        table = csprt_epochs(fig3, H1)
        assert len(table.times) == 20  # five onsets, three sub-epochs each
        assert_allclose(table.times[:4], FIG3_TIMES_HEAD, rtol=1e-9)
        assert table.times[4] == pytest.approx(25.12517962365466, rel=1e-9)
        assert table.times[-1] == pytest.approx(89.83672016720178, rel=1e-9)
        assert_allclose(
            table.drifts[:5], (0.1, 0.3, 0.5, 0.7, 0.9), rtol=1e-9, atol=1e-12
        )
        assert_allclose(table.fbar[:4], FIG3_FBAR_HEAD, rtol=1e-9, atol=1e-12)
        assert table.fbar[-1] == pytest.approx(174.36340338429784, rel=1e-9)
        assert table.drift_before == pytest.approx(-0.1)
        assert table.clamped

    def test_mean_stays_clamped(self, fig3):
        up = csprt_epochs(fig3, H1)
        assert min(up.fbar) >= 0.0
        down = csprt_epochs(fig3, H0)
        assert max(down.fbar) <= 0.0
        assert_allclose(down.times, up.times, rtol=1e-12)
        assert_allclose(down.fbar, [-f for f in up.fbar], rtol=1e-9, atol=1e-12)

    def test_sub_epochs_frozen_before_next_onset(self, fig3):
        # band promotions stop once the next node's onset arrives: every
        # onset gap here fits only 3 one-slot promotions
        table = csprt_epochs(fig3, H1)
        gaps = np.diff(table.times[:4])
        assert_allclose(gaps, [1.0, 1.0, 1.0], rtol=1e-9)
        assert table.times[4] - table.times[3] > 1.0

    def test_reference_delay(self, fig3):
        table = csprt_epochs(fig3, H1)
        assert csprt_edd_approx(table, 10.0) == pytest.approx(
            28.353150346110116, rel=1e-9
        )
        down = csprt_epochs(fig3, H0)
        assert csprt_edd_approx(down, 10.0) == pytest.approx(
            28.353150346110116, rel=1e-9
        )

    def test_requires_clamped_fusion(self, example1):
        with pytest.raises(ValueError):
            csprt_epochs(example1, H1)


class TestCsprtNoiseIncrement:
    def test_h1_uses_error_side_increment(self, fig3):
        inc = csprt_noise_increment(fig3, H1)
        assert inc.mean == pytest.approx(0.1, rel=1e-12)
        assert inc.variance == pytest.approx(0.2, rel=1e-12)

    def test_h0_mirrors_orientation(self, fig3):
        inc = csprt_noise_increment(fig3, H0)
        # symmetric design: same positive drift away from the boundary
        assert inc.mean == pytest.approx(0.1, rel=1e-12)
        assert inc.variance == pytest.approx(0.2, rel=1e-12)

    def test_dual_fusion_rejected(self, example1):
        with pytest.raises(ValueError):
            csprt_noise_increment(example1, H1)


FRED_REFERENCE = {
    2.0: 38.54752744183893,
    4.0: 335.3675775339817,
    6.0: 2553.1196928993113,
    8.0: 18965.723260090206,
}


class TestFredholm:
    def test_one_step_absorption(self):
        l0, lam = fredholm_lambda(5.0, GaussianModel(-100.0, 1e-4))
        assert l0 == pytest.approx(1.0, rel=1e-9)
        assert lam == pytest.approx(1.0, rel=1e-9)

    @pytest.mark.parametrize("beta,want", sorted(FRED_REFERENCE.items()))
    def test_reference_values(self, beta, want):
        l0, lam = fredholm_lambda(beta, GaussianModel(0.5, 1.0))
        assert l0 == pytest.approx(want, rel=1e-6)
        assert lam == pytest.approx(1.0 / want, rel=1e-6)

    def test_rate_decreasing_in_beta(self):
        lams = [
            fredholm_lambda(b, GaussianModel(0.5, 1.0))[1] for b in (2.0, 4.0, 6.0, 8.0)
        ]
        assert all(a > b for a, b in zip(lams, lams[1:]))

    def test_against_reflected_walk_simulation(self):
        times = oracles.reflected_walk_passage_times(3.0, 0.5, 1.0, 30_000, seed=9)
        l0, _ = fredholm_lambda(3.0, GaussianModel(0.5, 1.0))
        assert l0 == pytest.approx(times.mean(), rel=0.05)

    def test_input_validation(self):
        with pytest.raises(ValueError):
            fredholm_lambda(0.0, GaussianModel(0.5, 1.0))
        with pytest.raises(ValueError):
            fredholm_lambda(5.0, GaussianModel(0.5, 1.0), n_grid=4)

    def test_preset_increment_reference(self, fig3):
        inc = csprt_noise_increment(fig3, H1)
        l0, lam = fredholm_lambda(10.0, inc)
        assert l0 == pytest.approx(370562.34628891735, rel=1e-4)


class TestCsprtPmdApprox:
    def test_reference_value(self, fig3):
        inc = csprt_noise_increment(fig3, H1)
        lam = fredholm_lambda(10.0, inc)[1]
        dists = node_passage_distributions(fig3, H1)
        got = csprt_pmd_approx(lam, dists)
        assert got == pytest.approx(3.852786192063742e-05, rel=1e-6)

    def test_vanishing_rate_gives_vanishing_probability(self, fig3):
        dists = node_passage_distributions(fig3, H1)
        assert csprt_pmd_approx(1e-300, dists) == 0.0

    def test_corrected_series_is_a_probability(self, fig3):
        dists = node_passage_distributions(fig3, H1)
        for lam in (1e-6, 1e-3, 0.1, 0.9):
            assert 0.0 <= csprt_pmd_approx(lam, dists) <= 1.0

    def test_raw_series_overcounts_and_is_capped(self):
        silent = [PassageDistribution(1e7, 1.0)] * 3
        with pytest.warns(UserWarning):
            got = csprt_pmd_approx(1e-3, silent, series="as-written")
        assert got == 1.0

    def test_corrected_dominated_by_raw(self, fig3):
        dists = node_passage_distributions(fig3, H1)
        lam = 0.01
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            raw = csprt_pmd_approx(lam, dists, series="as-written")
        assert csprt_pmd_approx(lam, dists) <= raw

    def test_validation(self, fig3):
        dists = node_passage_distributions(fig3, H1)
        with pytest.raises(ValueError):
            csprt_pmd_approx(0.0, dists)
        with pytest.raises(ValueError):
            csprt_pmd_approx(0.1, dists, series="midpoint")


class TestAsymptoticConstants:
    def test_reference_values(self, example1):
        c = asymptotic_constants(example1)
        assert c.d_tot0 == pytest.approx(2.5, rel=1e-12)
        assert c.d_tot1 == pytest.approx(2.5, rel=1e-12)
        assert c.r == pytest.approx((0.2,) * 5, rel=1e-12)
        assert c.rho == pytest.approx((0.2,) * 5, rel=1e-12)
        assert c.delta_a0 == pytest.approx(-2.0, rel=1e-12)
        assert c.delta_a1 == pytest.approx(2.0, rel=1e-12)
        assert c.exi_star1 == pytest.approx(2.0078852928927695, rel=1e-12)
        assert c.exi_star0 == pytest.approx(2.0078852928927695, rel=1e-12)
        assert c.m1 == pytest.approx(0.9015770585785539, rel=1e-12)
        assert c.m0 == pytest.approx(0.9015770585785539, rel=1e-12)

    def test_folded_mean_matches_quadrature(self, example1):
        c = asymptotic_constants(example1)
        assert c.exi_star1 == pytest.approx(oracles.folded_mean_quad(-2.0, 0.8), rel=1e-9)

    def test_slope_bound_exceeds_centralized_limit(self, example1):
        c = asymptotic_constants(example1)
        assert c.m1 > 0.0 and c.m0 > 0.0
        assert 1.0 / c.d_tot1 + c.m1 > 1.0 / c.d_tot1

    def test_quantized_nodes_rejected(self, fig3):
        with pytest.raises(ValueError):
            asymptotic_constants(fig3)

    def test_bayes_mixture(self, example1):
        c = asymptotic_constants(example1)
        mid = bayes_risk_constant(c, 0.5)
        assert mid == pytest.approx(0.5 * c.m0 + 0.5 * c.m1, rel=1e-12)
        with pytest.raises(ValueError):
            bayes_risk_constant(c, 1.5)


class TestTheorem2Style:
    def test_reference_scenario_fails_condition(self, example1):
        assert theorem2_check_gaussian(example1) == (False, None)

    def test_large_channel_noise_satisfies_it(self):
        doc = PRESETS["example1"]()
        doc["channel"]["noise"]["variance"] = 5000.0
        holds, eta = theorem2_check_gaussian(scenario_from_dict(doc))
        assert holds
        assert eta == pytest.approx(0.00244140625, rel=1e-9)

    def test_custom_grid(self, example1):
        holds, eta = theorem2_check_gaussian(example1, eta_grid=np.linspace(0.01, 0.12, 12))
        assert not holds and eta is None

    def test_heterogeneous_nodes_rejected(self, example2):
        with pytest.raises(ValueError):
            theorem2_check_gaussian(example2)

    def test_asymmetric_design_rejected(self):
        doc = PRESETS["example1"]()
        doc["fusion"]["mu0"] = 0.5
        with pytest.raises(ValueError):
            theorem2_check_gaussian(scenario_from_dict(doc))


class TestLegendreRate:
    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
    def test_gaussian_rate(self, alpha):
        rng = np.random.default_rng(42)
        samples = rng.normal(0.0, 1.0, 400_000)
        assert legendre_rate(alpha, samples) == pytest.approx(alpha**2 / 2, rel=0.05)

    def test_zero_alpha_is_zero(self):
        samples = np.array([-1.0, 1.0] * 500)
        assert legendre_rate(0.0, samples) == pytest.approx(0.0, abs=1e-12)

    def test_folded_normal_matches_dense_grid(self):
        rng = np.random.default_rng(7)
        samples = np.abs(rng.normal(2.0, math.sqrt(0.8), 200_000))
        alpha = 2.5
        want = oracles.legendre_rate_dense(alpha, samples)
        assert legendre_rate(alpha, samples) == pytest.approx(want, rel=0.01)

    def test_unreachable_level_warns_at_grid_edge(self):
        rng = np.random.default_rng(3)
        samples = rng.normal(0.0, 1.0, 4000)
        with pytest.warns(UserWarning):
            legendre_rate(60.0, samples)

    @given(
        alpha=st.floats(-2.0, 2.0),
        loc=st.floats(-1.0, 1.0),
    )
    @settings(max_examples=30, deadline=None)
    def test_rate_is_nonnegative(self, alpha, loc):
        rng = np.random.default_rng(11)
        samples = rng.normal(loc, 1.0, 2000)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            assert legendre_rate(alpha, samples) >= -1e-12
