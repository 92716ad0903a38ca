"""Per-sensor sequential tests.

Two families:

* plain SPRT on the running LLR sum, with binary or 4-level quantized
  emissions once a threshold is crossed;
* a GLR test with clamped-MLE parameter estimate and time-varying stopping
  boundary g(n c), for unknown received power (fading), with binary or
  interval-quantized emissions.

Node state values are immutable; update functions return new states. A node
that has decided keeps updating its statistic and keeps emitting every slot
per its rule (there is no feedback channel to silence it), but the recorded
decision never flips.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .distributions import GaussianModel, Hypothesis, HypothesisPair, kl_divergence, llr


@dataclass(frozen=True)
class BinaryEmission:
    b1: float
    b0: float

    def __post_init__(self):
        if not (self.b1 > 0 > self.b0):
            raise ValueError(f"need b1 > 0 > b0, got ({self.b1}, {self.b0})")


@dataclass(frozen=True)
class QuantizedEmission:
    """Four-level quantizer over the overshoot past each threshold.

    Band i covers [gamma1 + (i-1) delta1, gamma1 + i delta1) above, with the
    fourth band unbounded; mirrored below -gamma0 with levels_down.
    """

    levels_up: tuple[float, float, float, float]
    levels_down: tuple[float, float, float, float]
    delta1: float
    delta0: float

    def __post_init__(self):
        lu, ld = self.levels_up, self.levels_down
        if len(lu) != 4 or len(ld) != 4:
            raise ValueError("levels_up/levels_down must have exactly 4 entries")
        if not all(lu[i] < lu[i + 1] for i in range(3)):
            raise ValueError(f"levels_up must be strictly increasing, got {lu}")
        if not all(ld[i] > ld[i + 1] for i in range(3)):
            raise ValueError(f"levels_down must be strictly decreasing, got {ld}")
        if not (self.delta1 > 0 and self.delta0 > 0):
            raise ValueError("delta1 and delta0 must be > 0")


@dataclass(frozen=True)
class IntervalQuantizedEmission:
    """Quantizer for the GLR statistic against the shrinking boundary family
    g(k c), g(k c 3 delta), g(k c 2 delta), g(k c delta)."""

    levels_up: tuple[float, float, float, float]
    levels_down: tuple[float, float, float, float]
    delta: float

    def __post_init__(self):
        lu, ld = self.levels_up, self.levels_down
        if len(lu) != 4 or len(ld) != 4:
            raise ValueError("levels_up/levels_down must have exactly 4 entries")
        if not all(lu[i] < lu[i + 1] for i in range(3)):
            raise ValueError(f"levels_up must be strictly increasing, got {lu}")
        if not all(ld[i] > ld[i + 1] for i in range(3)):
            raise ValueError(f"levels_down must be strictly decreasing, got {ld}")
        if not (0.0 < 3.0 * self.delta <= 1.0):
            raise ValueError(f"need 0 < 3*delta <= 1, got delta={self.delta}")


EmissionRule = BinaryEmission | QuantizedEmission
GlrEmissionRule = BinaryEmission | IntervalQuantizedEmission


@dataclass(frozen=True)
class SprtNodeConfig:
    gamma1: float
    gamma0: float
    emission: EmissionRule

    def __post_init__(self):
        if not (self.gamma1 > 0 and self.gamma0 > 0):
            raise ValueError("thresholds must be strictly positive")


def default_quantized_emission(
    pair: HypothesisPair,
    levels_up=(1.0, 2.0, 3.0, 4.0),
    levels_down=(-1.0, -2.0, -3.0, -4.0),
) -> QuantizedEmission:
    """Quantizer with band widths set to the node's drift magnitudes, which
    makes a correctly drifting statistic climb one band per slot on average."""
    return QuantizedEmission(
        levels_up=tuple(levels_up),
        levels_down=tuple(levels_down),
        delta1=pair.delta1,
        delta0=abs(pair.delta0),
    )


@dataclass(frozen=True)
class LocalNodeState:
    w: float = 0.0
    steps: int = 0
    decided: Hypothesis | None = None


def sprt_update(
    state: LocalNodeState, x: float, pair: HypothesisPair, cfg: SprtNodeConfig
) -> LocalNodeState:
    """One SPRT step: w += llr(x). The decision is latched at the first
    threshold crossing; w keeps accumulating afterwards (emission bands can
    rise over time)."""
    w = state.w + float(llr(x, pair))
    decided = state.decided
    if decided is None:
        if w >= cfg.gamma1:
            decided = Hypothesis.H1
        elif w <= -cfg.gamma0:
            decided = Hypothesis.H0
    return LocalNodeState(w=w, steps=state.steps + 1, decided=decided)


def _band(offset: float, inv_delta: float) -> int:
    i = int(math.floor(offset * inv_delta))
    return 3 if i > 3 else i


def sprt_emission(state: LocalNodeState, cfg: SprtNodeConfig) -> float:
    """Transmitted amplitude for the current statistic value; 0 inside the
    continue region (-gamma0, gamma1)."""
    w = state.w
    rule = cfg.emission
    if w >= cfg.gamma1:
        if isinstance(rule, BinaryEmission):
            return rule.b1
        return rule.levels_up[_band(w - cfg.gamma1, 1.0 / rule.delta1)]
    if w <= -cfg.gamma0:
        if isinstance(rule, BinaryEmission):
            return rule.b0
        return rule.levels_down[_band(-cfg.gamma0 - w, 1.0 / rule.delta0)]
    return 0.0


@dataclass(frozen=True)
class GlrNodeConfig:
    theta1: float
    a1: float
    a2: float
    c: float
    theta_star: float
    emission: GlrEmissionRule

    def __post_init__(self):
        if not self.theta1 > 0:
            raise ValueError(f"theta1 must be > 0, got {self.theta1}")
        if not (0.0 < self.c < 1.0):
            raise ValueError(f"c must be in (0, 1), got {self.c}")
        if not (self.a1 <= self.theta_star <= self.a2):
            raise ValueError(
                f"need a1 <= theta_star <= a2, got ({self.a1}, {self.theta_star}, {self.a2})"
            )


@dataclass(frozen=True)
class GlrNodeState:
    n: int = 0
    sum_x: float = 0.0
    w: float = 0.0
    theta_hat: float = 0.0
    decided: Hypothesis | None = None


def glr_threshold(n: int, c: float) -> float:
    """Stopping boundary g(n c) with g(t) = max(log(1/t), 0)."""
    return max(-math.log(n * c), 0.0)


def glr_decision(theta_hat: float, theta_star: float) -> Hypothesis:
    """Terminal decision once the boundary is hit; the tie goes to H1."""
    return Hypothesis.H1 if theta_hat >= theta_star else Hypothesis.H0


def glr_update(
    state: GlrNodeState, x: float, sigma_sq: float, cfg: GlrNodeConfig
) -> GlrNodeState:
    """One GLR step for Gaussian f_theta = N(theta, sigma_sq) with theta0 = 0.

    The statistic is recomputed in closed form from (n, sum_x):

        branch0 = (th * S - n th^2 / 2) / sigma_sq
        branch1 = ((th - theta1) S - n (th^2 - theta1^2) / 2) / sigma_sq
        w = max(branch0, branch1),  th = clamp(S/n, a1, a2)

    which equals the maximized log-likelihood-ratio sums evaluated at the
    clamped MLE. Decision latches the first time w >= g(n c); w and theta_hat
    keep updating afterwards.
    """
    if not sigma_sq > 0:
        raise ValueError(f"sigma_sq must be > 0, got {sigma_sq}")
    n = state.n + 1
    s = state.sum_x + x
    th = min(max(s / n, cfg.a1), cfg.a2)
    inv = 1.0 / sigma_sq
    branch0 = (th * s - n * (th * th * 0.5)) * inv
    t1 = cfg.theta1
    branch1 = ((th - t1) * s - n * ((th * th - t1 * t1) * 0.5)) * inv
    w = branch0 if branch0 >= branch1 else branch1
    decided = state.decided
    if decided is None and w >= glr_threshold(n, cfg.c):
        decided = glr_decision(th, cfg.theta_star)
    return GlrNodeState(n=n, sum_x=s, w=w, theta_hat=th, decided=decided)


def solve_theta_star(theta0: float, theta1: float, sigma_sq: float) -> float:
    """Indifference point: D(f_th || f_theta0) = D(f_th || f_theta1).

    Solved numerically on [theta0, theta1]; for equal-variance Gaussians the
    root is the midpoint.
    """
    if not theta0 < theta1:
        raise ValueError(f"need theta0 < theta1, got ({theta0}, {theta1})")

    def gap(th):
        f = GaussianModel(th, sigma_sq)
        return kl_divergence(f, GaussianModel(theta0, sigma_sq)) - kl_divergence(
            f, GaussianModel(theta1, sigma_sq)
        )

    lo, hi = gap(theta0), gap(theta1)
    if lo == 0.0:
        return theta0
    if hi == 0.0:
        return theta1
    if lo * hi > 0:
        raise ValueError("no indifference point in [theta0, theta1]")
    return float(brentq(gap, theta0, theta1, xtol=1e-12))


def glr_interval_boundaries(n: int, c: float, delta: float) -> tuple[float, float, float, float]:
    """Increasing boundaries (g(nc), g(nc 3d), g(nc 2d), g(nc d)) that carve
    the post-boundary region into the four emission bands at slot n."""
    t = n * c
    return (
        max(-math.log(t), 0.0),
        max(-math.log(t * 3.0 * delta), 0.0),
        max(-math.log(t * 2.0 * delta), 0.0),
        max(-math.log(t * delta), 0.0),
    )


def glr_emission(state: GlrNodeState, n: int, cfg: GlrNodeConfig) -> float:
    """Transmitted amplitude at slot n.

    Silent until the node has stopped. The emitted side is the latched
    decision; the band is read off the current statistic against the
    slot-n boundaries (so it is 0 again in slots where w dips below g(n c)).
    Binary rules emit the latched side's constant every slot after stopping.
    """
    if state.decided is None:
        return 0.0
    rule = cfg.emission
    up = state.decided == Hypothesis.H1
    if isinstance(rule, BinaryEmission):
        return rule.b1 if up else rule.b0
    b0, b1, b2, b3 = glr_interval_boundaries(n, cfg.c, rule.delta)
    w = state.w
    if w < b0:
        return 0.0
    level = (1 if w >= b1 else 0) + (1 if w >= b2 else 0) + (1 if w >= b3 else 0)
    return rule.levels_up[level] if up else rule.levels_down[level]


def glr_reset(cfg: GlrNodeConfig) -> GlrNodeState:
    """Fresh state with theta_hat pinned inside the clamp interval."""
    return GlrNodeState(theta_hat=min(max(0.0, cfg.a1), cfg.a2))


__all__ = [
    "BinaryEmission",
    "QuantizedEmission",
    "IntervalQuantizedEmission",
    "EmissionRule",
    "GlrEmissionRule",
    "SprtNodeConfig",
    "GlrNodeConfig",
    "LocalNodeState",
    "GlrNodeState",
    "sprt_update",
    "sprt_emission",
    "glr_update",
    "glr_threshold",
    "glr_decision",
    "glr_emission",
    "glr_interval_boundaries",
    "glr_reset",
    "solve_theta_star",
    "default_quantized_emission",
]
