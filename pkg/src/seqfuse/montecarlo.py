"""Seeded trial engine: detection-delay and error-probability estimation
with standard errors, plus threshold sweeps with common random numbers.

Determinism contract: every trial owns the stream derived from
SeedSequence([master_seed, trial_index]). Estimates are reduced in trial
order, so the result is a pure function of (scenario, hypothesis, n_trials,
master_seed), independent of the worker count and of the kernel backend.
"""

from __future__ import annotations

import enum
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np

from . import _kernels
from .channel import ChannelConfig
from .distributions import Hypothesis, HypothesisPair
from .fusion import FusionConfig
from .local_node import BinaryEmission, GlrNodeConfig, SprtNodeConfig


class Decision(enum.IntEnum):
    H0 = 0
    H1 = 1
    TRUNCATED = 2


@dataclass(frozen=True)
class TrialResult:
    decision: Decision
    stop_time: int


@dataclass(frozen=True)
class PerformanceEstimate:
    edd: float
    edd_se: float
    p_error: float
    p_error_se: float
    n_trials: int
    truncation_rate: float


@dataclass(frozen=True)
class Scenario:
    """Full experiment description.

    ``pairs`` are the design densities the nodes test against; the channel's
    gains or fading act on the generated data only (a node is not told its
    realized gain). For GLR nodes the test's noise variance is read from
    f0.variance and the data must be centered so that theta0 = 0.
    """

    channel: ChannelConfig
    node_configs: tuple
    fusion: FusionConfig
    pairs: tuple[HypothesisPair, ...]
    max_steps: int
    node_test: Literal["sprt", "cusum"] = "sprt"

    def __post_init__(self):
        L = len(self.node_configs)
        if L < 1:
            raise ValueError("need at least one node")
        if len(self.pairs) != L:
            raise ValueError(
                f"pairs has {len(self.pairs)} entries for {L} node configs"
            )
        hint = self.channel.n_nodes_hint()
        if hint is not None and hint != L:
            raise ValueError(f"channel lists {hint} gains for {L} nodes")
        if self.channel.fc_noise != self.fusion.noise:
            raise ValueError(
                "channel.fc_noise and the fusion design noise must be the same law"
            )
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        kinds = {type(c) for c in self.node_configs}
        if len(kinds) != 1:
            raise ValueError("node configs must all be SPRT or all GLR")
        kind = kinds.pop()
        if kind not in (SprtNodeConfig, GlrNodeConfig):
            raise ValueError(f"unsupported node config type {kind.__name__}")
        rules = {type(c.emission) for c in self.node_configs}
        if len(rules) != 1:
            raise ValueError("all nodes must share one emission rule family")
        if self.node_test not in ("sprt", "cusum"):
            raise ValueError(f"node_test must be 'sprt' or 'cusum', got {self.node_test!r}")
        if self.node_test == "cusum" and kind is not SprtNodeConfig:
            raise ValueError("clamped node statistics apply to SPRT nodes only")
        if kind is GlrNodeConfig:
            for i, pair in enumerate(self.pairs):
                if pair.f0.mean != 0.0:
                    raise ValueError(
                        f"node {i}: GLR testing assumes centered data (f0 mean 0), "
                        f"got {pair.f0.mean}"
                    )

    @property
    def n_nodes(self) -> int:
        return len(self.node_configs)

    @property
    def is_glr(self) -> bool:
        return isinstance(self.node_configs[0], GlrNodeConfig)

    def algorithm_label(self) -> str:
        fc = self.fusion.algorithm
        if self.is_glr:
            return "glr-csprt" if fc == "csprt" else "glr-sprt"
        if self.node_test == "cusum":
            return "dual-csprt"
        return "sprt-csprt" if fc == "csprt" else "dualsprt"

    def with_beta(self, beta1: float, beta0: float | None = None) -> "Scenario":
        if beta0 is None:
            beta0 = beta1
        return replace(self, fusion=replace(self.fusion, beta1=beta1, beta0=beta0))


def build_kernel_params(scenario: Scenario) -> _kernels.KernelParams:
    """Freeze the scenario into flat kernel arrays. The per-trial block
    (observation means, LLR coefficients) is filled separately."""
    L = scenario.n_nodes
    T = scenario.max_steps
    cfgs = scenario.node_configs
    fus = scenario.fusion
    af, bf = fus.dual_coefficients()
    au, bu = fus.up_coefficients()
    ad, bd = fus.down_coefficients()
    common = dict(
        Af=af,
        Bf=bf,
        Au=au,
        Bu=bu,
        Ad=ad,
        Bd=bd,
        beta1=fus.beta1,
        beta0=fus.beta0,
        mz=fus.noise.mean,
        sigz=fus.noise.std,
        fc_mode=0 if fus.algorithm == "dual_sprt" else 1,
    )
    rule0 = cfgs[0].emission
    if not scenario.is_glr:
        binary = isinstance(rule0, BinaryEmission)
        p = _kernels.KernelParams(
            L,
            T,
            node_kind=0,
            node_clamped=1 if scenario.node_test == "cusum" else 0,
            emit_kind=0 if binary else 1,
            gamma1=[c.gamma1 for c in cfgs],
            gamma0=[c.gamma0 for c in cfgs],
            b1=[c.emission.b1 for c in cfgs] if binary else None,
            b0=[c.emission.b0 for c in cfgs] if binary else None,
            levels_up=None if binary else [c.emission.levels_up for c in cfgs],
            levels_down=None if binary else [c.emission.levels_down for c in cfgs],
            inv_d1=None if binary else [1.0 / c.emission.delta1 for c in cfgs],
            inv_d0=None if binary else [1.0 / c.emission.delta0 for c in cfgs],
            **common,
        )
        return p
    binary = isinstance(rule0, BinaryEmission)
    gbound = np.zeros((L, T + 1))
    gband = np.zeros((L, T + 1, 3))
    k = np.arange(1, T + 1, dtype=np.float64)
    for i, c in enumerate(cfgs):
        gbound[i, 1:] = np.maximum(-np.log(k * c.c), 0.0)
        if not binary:
            d = c.emission.delta
            gband[i, 1:, 0] = np.maximum(-np.log(k * c.c * (3.0 * d)), 0.0)
            gband[i, 1:, 1] = np.maximum(-np.log(k * c.c * (2.0 * d)), 0.0)
            gband[i, 1:, 2] = np.maximum(-np.log(k * c.c * d), 0.0)
    return _kernels.KernelParams(
        L,
        T,
        node_kind=1,
        node_clamped=0,
        emit_kind=0 if binary else 1,
        b1=[c.emission.b1 for c in cfgs] if binary else None,
        b0=[c.emission.b0 for c in cfgs] if binary else None,
        levels_up=None if binary else [c.emission.levels_up for c in cfgs],
        levels_down=None if binary else [c.emission.levels_down for c in cfgs],
        theta1=[c.theta1 for c in cfgs],
        a1=[c.a1 for c in cfgs],
        a2=[c.a2 for c in cfgs],
        theta_star=[c.theta_star for c in cfgs],
        inv_sigma_sq=[1.0 / p.f0.variance for p in scenario.pairs],
        gbound=gbound,
        gband=gband,
        **common,
    )


def _fill_trial_block(scenario: Scenario, hypothesis: Hypothesis, p, gains) -> None:
    pairs = scenario.pairs
    if hypothesis == Hypothesis.H1:
        p.obs_mean[:] = [g * pr.f1.mean for g, pr in zip(gains, pairs)]
        p.obs_std[:] = [pr.f1.std for pr in pairs]
    else:
        p.obs_mean[:] = [pr.f0.mean for pr in pairs]
        p.obs_std[:] = [pr.f0.std for pr in pairs]
    if not scenario.is_glr:
        coefs = [pr.llr_coefficients() for pr in pairs]
        p.qa[:] = [c[0] for c in coefs]
        p.qb[:] = [c[1] for c in coefs]
        p.qc[:] = [c[2] for c in coefs]


def _trial_gen(master_seed, trial_index=None):
    if trial_index is None:
        seed = master_seed
    else:
        seed = [master_seed, trial_index]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def _draw_gains(scenario: Scenario, gen) -> np.ndarray:
    ch = scenario.channel
    if ch.fading is not None:
        return gen.exponential(ch.fading.mean_power, scenario.n_nodes)
    return np.asarray(ch.gains, dtype=np.float64)


def run_trial(scenario: Scenario, hypothesis: Hypothesis, trial_seed) -> TrialResult:
    """Run one trial on the stream seeded by ``trial_seed`` (an int or a
    sequence of ints fed to SeedSequence). Fading gains, when configured,
    are drawn from the same stream before the first slot."""
    p = build_kernel_params(scenario)
    gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence(trial_seed)))
    gains = _draw_gains(scenario, gen)
    _fill_trial_block(scenario, hypothesis, p, gains)
    dec, stop, _, _ = _kernels.run_trial(p, gen)
    return TrialResult(decision=Decision(dec), stop_time=stop)


def _run_block(scenario, hypothesis, master_seed, start, count):
    p = build_kernel_params(scenario)
    static = scenario.channel.fading is None
    if static:
        _fill_trial_block(scenario, hypothesis, p, np.asarray(scenario.channel.gains))
    dec = np.empty(count, dtype=np.uint8)
    stop = np.empty(count, dtype=np.int64)
    for j in range(count):
        gen = _trial_gen(master_seed, start + j)
        if not static:
            gains = _draw_gains(scenario, gen)
            _fill_trial_block(scenario, hypothesis, p, gains)
        d, s, _, _ = _kernels.run_trial(p, gen)
        dec[j] = d
        stop[j] = s
    return dec, stop


def _run_trials(scenario, hypothesis, n_trials, master_seed, workers):
    if workers <= 1 or n_trials < 2 * workers:
        return _run_block(scenario, hypothesis, master_seed, 0, n_trials)
    block = max(1, -(-n_trials // (workers * 4)))
    starts = list(range(0, n_trials, block))
    jobs = [(scenario, hypothesis, master_seed, s, min(block, n_trials - s)) for s in starts]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_run_block_star, jobs))
    dec = np.concatenate([a for a, _ in parts])
    stop = np.concatenate([b for _, b in parts])
    return dec, stop


def _run_block_star(args):
    return _run_block(*args)


def estimate(
    scenario: Scenario,
    hypothesis: Hypothesis,
    n_trials: int,
    master_seed: int,
    workers: int = 1,
) -> PerformanceEstimate:
    """Monte Carlo estimate over n_trials independent trials.

    The delay is averaged over decided trials only; p_error is the fraction
    of all trials deciding the wrong hypothesis (truncated trials count into
    truncation_rate instead, with a warning above 1%).
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    dec, stop = _run_trials(scenario, hypothesis, n_trials, master_seed, workers)
    decided = dec != int(Decision.TRUNCATED)
    wrong_code = int(Decision.H0) if hypothesis == Hypothesis.H1 else int(Decision.H1)
    p_err = float(np.count_nonzero(dec == wrong_code)) / n_trials
    p_err_se = (
        math.sqrt(p_err * (1.0 - p_err) / n_trials) if n_trials > 1 else math.inf
    )
    n_dec = int(np.count_nonzero(decided))
    if n_dec == 0:
        warnings.warn("no trial reached a decision; edd is undefined", stacklevel=2)
        edd, edd_se = math.nan, math.inf
    else:
        times = stop[decided]
        edd = float(np.mean(times))
        edd_se = (
            float(np.std(times, ddof=1)) / math.sqrt(n_dec) if n_dec > 1 else math.inf
        )
    trunc = float(np.count_nonzero(dec == int(Decision.TRUNCATED))) / n_trials
    if trunc > 0.01:
        warnings.warn(
            f"truncation rate {trunc:.3f} exceeds 1%; raise max_steps", stacklevel=2
        )
    return PerformanceEstimate(
        edd=edd,
        edd_se=edd_se,
        p_error=p_err,
        p_error_se=p_err_se,
        n_trials=n_trials,
        truncation_rate=trunc,
    )


def sweep(
    scenario: Scenario,
    hypothesis: Hypothesis,
    beta_values,
    n_trials: int,
    master_seed: int,
    workers: int = 1,
) -> list[tuple[float, PerformanceEstimate]]:
    """One estimate per threshold with beta1 = beta0 = beta, reusing the same
    per-trial streams at every point (common random numbers)."""
    if len(beta_values) == 0:
        raise ValueError("beta_values must be nonempty")
    return [
        (
            float(b),
            estimate(scenario.with_beta(float(b)), hypothesis, n_trials, master_seed, workers),
        )
        for b in beta_values
    ]


def mean_statistic_path(
    scenario: Scenario,
    hypothesis: Hypothesis,
    n_paths: int,
    horizon: int,
    master_seed: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Ensemble mean of the fusion statistic over unstopped trials, slot by
    slot: (mean dual statistic, zeros) or (mean up pair, mean down pair)."""
    p = build_kernel_params(scenario)
    static = scenario.channel.fading is None
    if static:
        _fill_trial_block(scenario, hypothesis, p, np.asarray(scenario.channel.gains))
    acc_a = np.zeros(horizon)
    acc_b = np.zeros(horizon)
    for i in range(n_paths):
        gen = _trial_gen(master_seed, i)
        if not static:
            _fill_trial_block(scenario, hypothesis, p, _draw_gains(scenario, gen))
        fa, fb = _kernels.statistic_path(p, gen, horizon)
        acc_a += fa
        acc_b += fb
    acc_a /= n_paths
    acc_b /= n_paths
    return acc_a, acc_b
