"""Observation generation (gains, slow fading, energy-detector statistics)
and the sensor-to-fusion multiple-access channel with additive noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import GaussianModel, Hypothesis, HypothesisPair


@dataclass(frozen=True)
class RayleighFading:
    """Slow Rayleigh fading: received power is exponential with the given
    mean, drawn once per node per trial and held for the whole trial."""

    mean_power: float

    def __post_init__(self):
        if not self.mean_power > 0:
            raise ValueError(f"mean_power must be > 0, got {self.mean_power}")


@dataclass(frozen=True)
class ChannelConfig:
    """Channel description: either fixed linear gains or slow fading, plus
    the reporting-MAC noise law seen by the fusion center.

    ``gains`` scale the post-change observation mean of each node; under
    fading the per-trial power draw plays that role instead. ``fc_noise``
    is the additive noise on the fused sum.
    """

    fc_noise: GaussianModel
    gains: tuple[float, ...] | None = None
    fading: RayleighFading | None = None

    def __post_init__(self):
        if (self.gains is None) == (self.fading is None):
            raise ValueError("exactly one of gains/fading must be set")
        if self.gains is not None and len(self.gains) < 1:
            raise ValueError("gains must list at least one node")

    def n_nodes_hint(self) -> int | None:
        return None if self.gains is None else len(self.gains)


@dataclass(frozen=True)
class EnergyDetectorModel:
    """Gaussian approximation of an M-sample energy detector at receiver
    noise level sigma_sq and received primary power received_power."""

    M: int
    sigma_sq: float
    received_power: float

    def __post_init__(self):
        if self.M < 1:
            raise ValueError(f"M must be >= 1, got {self.M}")
        if not self.sigma_sq > 0:
            raise ValueError(f"sigma_sq must be > 0, got {self.sigma_sq}")
        if self.received_power < 0:
            raise ValueError(f"received_power must be >= 0, got {self.received_power}")


def observation(
    hypothesis: Hypothesis, gain: float, pair_base: HypothesisPair, rng: np.random.Generator
) -> float:
    """Draw one sensor observation.

    Under H0 the draw comes from f0. Under H1 the mean of f1 is scaled by
    the node's (possibly faded) gain; the variance is unchanged, which is
    the mean-shift reading of the sensing model.
    """
    if hypothesis == Hypothesis.H0:
        return pair_base.f0.sample(rng)
    return rng.normal(gain * pair_base.f1.mean, pair_base.f1.std)


def mac_fuse(emissions, z: float) -> float:
    """Fused channel output: the exact sum of all node emissions plus one
    noise draw. Silent nodes contribute 0."""
    total = 0.0
    for e in emissions:
        total += e
    return total + z


def draw_fading_power(fading: RayleighFading, rng: np.random.Generator) -> float:
    """One received-power draw (exponential with the configured mean)."""
    return rng.exponential(fading.mean_power)


def energy_detector_pair(model: EnergyDetectorModel) -> HypothesisPair:
    """Hypothesis pair of the mean-centered energy detector output.

    The detector's raw mean under H0 is sigma_sq; subtracting it gives
    f0 = N(0, 2 sigma_sq^2 / M) and f1 = N(P, 2 (P + sigma_sq)^2 / M).
    With P = 0 the two densities coincide.
    """
    v0 = 2.0 * model.sigma_sq**2 / model.M
    v1 = 2.0 * (model.received_power + model.sigma_sq) ** 2 / model.M
    return HypothesisPair(
        f0=GaussianModel(0.0, v0),
        f1=GaussianModel(model.received_power, v1),
    )
