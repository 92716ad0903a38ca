import math
from dataclasses import replace

import numpy as np
import pytest

from seqfuse.channel import ChannelConfig, RayleighFading
from seqfuse.distributions import GaussianModel, Hypothesis, HypothesisPair
from seqfuse.fusion import FusionConfig
from seqfuse.local_node import BinaryEmission, SprtNodeConfig
from seqfuse.montecarlo import (
    Decision,
    Scenario,
    estimate,
    mean_statistic_path,
    run_trial,
    sweep,
)

NOISE = GaussianModel(0.0, 5.0)
PAIR = HypothesisPair(f0=GaussianModel(0.0, 1.0), f1=GaussianModel(1.0, 1.0))
NODE = SprtNodeConfig(gamma1=10.0, gamma0=10.0, emission=BinaryEmission(1.0, -1.0))


def tiny_scenario(**overrides):
    base = dict(
        channel=ChannelConfig(fc_noise=NOISE, gains=(1.0, 1.0)),
        node_configs=(NODE, NODE),
        fusion=FusionConfig(mu1=1.0, mu0=1.0, beta1=10.0, beta0=10.0, noise=NOISE),
        pairs=(PAIR, PAIR),
        max_steps=800,
    )
    base.update(overrides)
    return Scenario(**base)


class TestScenarioValidation:
    def test_pairs_length_must_match(self):
        with pytest.raises(ValueError):
            tiny_scenario(pairs=(PAIR,))

    def test_gains_hint_must_match(self):
        with pytest.raises(ValueError):
            tiny_scenario(channel=ChannelConfig(fc_noise=NOISE, gains=(1.0,)))

    def test_channel_noise_must_equal_fusion_design_noise(self):
        with pytest.raises(ValueError):
            tiny_scenario(
                channel=ChannelConfig(fc_noise=GaussianModel(0.0, 4.0), gains=(1.0, 1.0))
            )

    def test_max_steps_positive(self):
        with pytest.raises(ValueError):
            tiny_scenario(max_steps=0)

    def test_node_test_name_checked(self):
        with pytest.raises(ValueError):
            tiny_scenario(node_test="tandem")

    def test_glr_requires_centered_f0(self, glr_fading):
        shifted = HypothesisPair(f0=GaussianModel(0.5, 1.0), f1=GaussianModel(1.0, 1.0))
        with pytest.raises(ValueError):
            replace(glr_fading, pairs=(shifted,) + glr_fading.pairs[1:])

    def test_at_least_one_node(self):
        with pytest.raises(ValueError):
            tiny_scenario(node_configs=(), pairs=(),
                          channel=ChannelConfig(fc_noise=NOISE, fading=RayleighFading(1.0)))


class TestScenarioLabels:
    def test_dualsprt(self, example1):
        assert example1.algorithm_label() == "dualsprt"

    def test_sprt_csprt(self, fig3):
        assert fig3.algorithm_label() == "sprt-csprt"

    def test_dual_csprt(self, fig3):
        assert replace(fig3, node_test="cusum").algorithm_label() == "dual-csprt"

    def test_glr_csprt(self, glr_fading):
        assert glr_fading.algorithm_label() == "glr-csprt"

    def test_glr_sprt(self, glr_fading):
        flipped = replace(glr_fading, fusion=replace(glr_fading.fusion, algorithm="dual_sprt"))
        assert flipped.algorithm_label() == "glr-sprt"


def test_with_beta_changes_thresholds_only(example1):
    other = example1.with_beta(7.0)
    assert other.fusion.beta1 == other.fusion.beta0 == 7.0
    assert other.pairs == example1.pairs
    assert other.node_configs == example1.node_configs
    asym = example1.with_beta(7.0, 3.0)
    assert (asym.fusion.beta1, asym.fusion.beta0) == (7.0, 3.0)


def test_run_trial_is_seed_deterministic(example1):
    a = run_trial(example1, Hypothesis.H1, [17, 4])
    b = run_trial(example1, Hypothesis.H1, [17, 4])
    assert a == b
    assert a.decision in (Decision.H0, Decision.H1)
    assert 1 <= a.stop_time <= example1.max_steps


def test_run_trial_varies_across_seeds(example1):
    stops = {run_trial(example1, Hypothesis.H1, [3, i]).stop_time for i in range(12)}
    assert len(stops) > 1


def test_estimate_basic_accounting(example1):
    r = estimate(example1, Hypothesis.H1, 400, master_seed=8)
    assert r.n_trials == 400
    assert 0.0 <= r.p_error <= 1.0
    assert r.truncation_rate == 0.0
    assert 10.0 < r.edd < 60.0
    assert r.edd_se > 0.0


def test_estimate_worker_split_is_invisible(example1):
    one = estimate(example1, Hypothesis.H1, 300, master_seed=5, workers=1)
    many = estimate(example1, Hypothesis.H1, 300, master_seed=5, workers=4)
    assert one == many


def test_estimate_truncation_accounting(example1):
    cramped = replace(example1, max_steps=2).with_beta(500.0)
    with pytest.warns(UserWarning):
        r = estimate(cramped, Hypothesis.H1, 50, master_seed=1)
    assert r.truncation_rate == 1.0
    assert math.isnan(r.edd)
    assert r.p_error == 0.0


def test_estimate_counts_only_wrong_side_errors(example1):
    # under H1 with a tiny H1 threshold, every decision is H1: no errors
    quick = example1.with_beta(0.5, 500.0)
    r = estimate(quick, Hypothesis.H1, 200, master_seed=3)
    assert r.p_error == 0.0
    # under H0 most trials still hit the near boundary first and are errors
    r0 = estimate(quick, Hypothesis.H0, 200, master_seed=3)
    assert r0.p_error > 0.5


def test_estimate_rejects_empty_run(example1):
    with pytest.raises(ValueError):
        estimate(example1, Hypothesis.H1, 0, master_seed=0)


def test_sweep_common_random_numbers_make_delay_monotone(example1):
    res = sweep(example1, Hypothesis.H1, (4.0, 8.0, 12.0, 16.0), 300, master_seed=12)
    betas = [b for b, _ in res]
    assert betas == [4.0, 8.0, 12.0, 16.0]
    edds = [r.edd for _, r in res]
    assert all(a <= b + 1e-12 for a, b in zip(edds, edds[1:]))


def test_sweep_rejects_empty_grid(example1):
    with pytest.raises(ValueError):
        sweep(example1, Hypothesis.H1, (), 10, master_seed=0)


def test_mean_statistic_path_drifts(example1, fig3):
    path, other = mean_statistic_path(example1, Hypothesis.H1, 200, 30, master_seed=2)
    assert path.shape == (30,)
    assert path[-1] > path[0]
    assert np.all(other == 0.0)

    up, down = mean_statistic_path(fig3, Hypothesis.H1, 200, 30, master_seed=2)
    assert np.all(up >= -1e-12)
    assert np.all(down <= 1e-12)
    assert up[-1] > up[0]
