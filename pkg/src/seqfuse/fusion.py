"""Fusion-center sequential tests.

Two variants over the fused channel output Y_k:

* a single two-sided SPRT on the running sum of log[g_mu1(Y)/g_-mu0(Y)],
  where g_mu1 and g_-mu0 are the noise density shifted by +mu1 and -mu0;
* a clamped pair (CUSUM-style): F1 accumulates log[g_mu1/g_Z] clamped at 0
  from below, F0 accumulates log[g_Z/g_-mu0] clamped at 0 from above. The
  clamps keep pre-change noise from building up a bias in either statistic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

from .distributions import GaussianModel, Hypothesis

Side = Literal["up", "down"]


@dataclass(frozen=True)
class FusionConfig:
    mu1: float
    mu0: float
    beta1: float
    beta0: float
    noise: GaussianModel
    algorithm: Literal["dual_sprt", "csprt"] = "dual_sprt"

    def __post_init__(self):
        if not (self.mu1 > 0 and self.mu0 > 0):
            raise ValueError("design means mu1, mu0 must be > 0")
        if not (self.beta1 > 0 and self.beta0 > 0):
            raise ValueError("thresholds beta1, beta0 must be > 0")
        if self.algorithm not in ("dual_sprt", "csprt"):
            raise ValueError(f"unknown fusion algorithm {self.algorithm!r}")

    # Affine forms of the three log-ratios; every increment is A*y + B.
    def dual_coefficients(self) -> tuple[float, float]:
        mz, v = self.noise.mean, self.noise.variance
        a = (self.mu0 + self.mu1) / v
        b = -(self.mu0 + self.mu1) * mz / v + (self.mu0**2 - self.mu1**2) / (2.0 * v)
        return a, b

    def up_coefficients(self) -> tuple[float, float]:
        mz, v = self.noise.mean, self.noise.variance
        return self.mu1 / v, -self.mu1 * mz / v - self.mu1**2 / (2.0 * v)

    def down_coefficients(self) -> tuple[float, float]:
        mz, v = self.noise.mean, self.noise.variance
        return self.mu0 / v, -self.mu0 * mz / v + self.mu0**2 / (2.0 * v)


@dataclass(frozen=True)
class DualSprtState:
    f: float = 0.0
    steps: int = 0
    decision: Hypothesis | None = None


@dataclass(frozen=True)
class CsprtState:
    f1: float = 0.0
    f0: float = 0.0
    steps: int = 0
    decision: Hypothesis | None = None

    def __post_init__(self):
        if self.f1 < 0 or self.f0 > 0:
            raise ValueError("clamp invariant violated: need f1 >= 0 and f0 <= 0")


FusionState = DualSprtState | CsprtState


def fc_llr_dual(y: float, cfg: FusionConfig) -> float:
    """log g_mu1(y) - log g_-mu0(y); equals 2 mu y / sigma_sq for the
    symmetric design mu1 = mu0 = mu with zero-mean noise."""
    a, b = cfg.dual_coefficients()
    return a * y + b


def fc_llr_csprt(y: float, cfg: FusionConfig, side: Side) -> float:
    """One-sided increments: 'up' is log g_mu1(y) - log g_Z(y), 'down' is
    log g_Z(y) - log g_-mu0(y)."""
    if side == "up":
        a, b = cfg.up_coefficients()
    elif side == "down":
        a, b = cfg.down_coefficients()
    else:
        raise ValueError(f"side must be 'up' or 'down', got {side!r}")
    return a * y + b


def fusion_step(state: FusionState, y: float, cfg: FusionConfig) -> FusionState:
    """Advance the fusion statistic by one fused observation.

    Stepping a decided state is a contract violation. If both clamped
    statistics cross in the same slot, H1 wins (deterministic tie rule).
    """
    if state.decision is not None:
        raise RuntimeError("fusion_step called after the decision was made")
    if isinstance(state, DualSprtState):
        f = state.f + fc_llr_dual(y, cfg)
        decision = None
        if f >= cfg.beta1:
            decision = Hypothesis.H1
        elif f <= -cfg.beta0:
            decision = Hypothesis.H0
        return DualSprtState(f=f, steps=state.steps + 1, decision=decision)
    f1 = state.f1 + fc_llr_csprt(y, cfg, "up")
    if f1 < 0.0:
        f1 = 0.0
    f0 = state.f0 + fc_llr_csprt(y, cfg, "down")
    if f0 > 0.0:
        f0 = 0.0
    decision = None
    if f1 >= cfg.beta1:
        decision = Hypothesis.H1
    elif f0 <= -cfg.beta0:
        decision = Hypothesis.H0
    return CsprtState(f1=f1, f0=f0, steps=state.steps + 1, decision=decision)


def initial_state(cfg: FusionConfig) -> FusionState:
    return DualSprtState() if cfg.algorithm == "dual_sprt" else CsprtState()
