"""Gaussian observation models, log-likelihood ratios, divergences, and the
Gaussian first-passage approximation.

Everything downstream (nodes, fusion center, analysis) is built on the three
value types defined here. All types are immutable; sampling takes an explicit
``numpy.random.Generator`` so that callers own the stream.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr


class Hypothesis(enum.IntEnum):
    H0 = 0
    H1 = 1


@dataclass(frozen=True)
class GaussianModel:
    """A univariate normal N(mean, variance)."""

    mean: float
    variance: float

    def __post_init__(self):
        if not self.variance > 0:
            raise ValueError(f"variance must be > 0, got {self.variance}")

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)

    def logpdf(self, x):
        return -0.5 * math.log(2.0 * math.pi * self.variance) - (x - self.mean) ** 2 / (
            2.0 * self.variance
        )

    def cdf(self, x):
        return ndtr((x - self.mean) / self.std)

    def sf(self, x):
        return ndtr((self.mean - x) / self.std)

    def sample(self, rng: np.random.Generator, size=None):
        return rng.normal(self.mean, self.std, size)


@dataclass(frozen=True)
class HypothesisPair:
    """Observation densities of one sensor under both hypotheses.

    The drift and variance of the per-sample log-likelihood ratio are derived
    on construction:

        delta1 = E_1[llr] = D(f1 || f0) >= 0
        delta0 = E_0[llr] = -D(f0 || f1) <= 0
        rho{i}_sq = Var_i[llr]

    A degenerate pair with f0 == f1 is allowed (all four derived statistics
    are then zero); routines that require a strictly informative pair check
    the drift sign themselves.
    """

    f0: GaussianModel
    f1: GaussianModel
    delta0: float = field(init=False)
    delta1: float = field(init=False)
    rho0_sq: float = field(init=False)
    rho1_sq: float = field(init=False)

    def __post_init__(self):
        d1, r1 = llr_stats_under(self, self.f1)
        d0, r0 = llr_stats_under(self, self.f0)
        object.__setattr__(self, "delta1", d1)
        object.__setattr__(self, "delta0", d0)
        object.__setattr__(self, "rho1_sq", r1)
        object.__setattr__(self, "rho0_sq", r0)

    def llr_coefficients(self) -> tuple[float, float, float]:
        """Coefficients (a, b, c) of llr(x) = a x^2 + b x + c."""
        m0, v0 = self.f0.mean, self.f0.variance
        m1, v1 = self.f1.mean, self.f1.variance
        a = 1.0 / (2.0 * v0) - 1.0 / (2.0 * v1)
        b = m1 / v1 - m0 / v0
        c = m0 * m0 / (2.0 * v0) - m1 * m1 / (2.0 * v1) + 0.5 * math.log(v0 / v1)
        return a, b, c


@dataclass(frozen=True)
class PassageDistribution:
    """Gaussian approximation of a threshold-crossing time, in time slots."""

    mean: float
    variance: float

    def __post_init__(self):
        if not (self.mean > 0 and self.variance > 0):
            raise ValueError(
                f"passage mean/variance must be > 0, got ({self.mean}, {self.variance})"
            )

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)

    def cdf(self, x):
        return ndtr((x - self.mean) / self.std)


def llr(x, pair: HypothesisPair):
    """log f1(x) - log f0(x). Accepts scalars or arrays.

    For equal-variance Gaussians this reduces to (x - (m0+m1)/2)(m1-m0)/v.
    """
    a, b, c = pair.llr_coefficients()
    return a * x * x + b * x + c


def kl_divergence(p: GaussianModel, q: GaussianModel) -> float:
    """D(p || q) for Gaussians, >= 0 with equality iff p == q."""
    return (
        0.5 * math.log(q.variance / p.variance)
        + (p.variance + (p.mean - q.mean) ** 2) / (2.0 * q.variance)
        - 0.5
    )


def llr_stats_under(pair: HypothesisPair, law: GaussianModel) -> tuple[float, float]:
    """Mean and variance of pair's log-ratio when the data actually follow
    ``law``, which need not be either of the pair's own densities (channel
    gain shifts the signal but the node still tests its design pair).

    Mean and variance of a quadratic a x^2 + b x + c under x ~ N(m, v):
      E = a (v + m^2) + b m + c
      Var = 2 a^2 v^2 + v (2 a m + b)^2
    """
    a, b, c = pair.llr_coefficients()
    m, v = law.mean, law.variance
    mean = a * (v + m * m) + b * m + c
    var = 2.0 * a * a * v * v + v * (2.0 * a * m + b) ** 2
    return mean, var


def drift_stats(pair: HypothesisPair, hypothesis: Hypothesis) -> tuple[float, float]:
    """(delta, rho_sq): mean and variance of the LLR increment under the
    given hypothesis. Closed form; agrees with kl_divergence exactly."""
    return llr_stats_under(
        pair, pair.f1 if hypothesis == Hypothesis.H1 else pair.f0
    )


def passage_approx(gamma: float, delta: float, rho_sq: float) -> PassageDistribution:
    """Normal approximation of the first passage time of a positive-drift
    random walk over level gamma: N(gamma/delta, rho_sq * gamma / delta^3).

    Rejects non-positive drift, where the crossing time has no Gaussian
    approximation of this form.
    """
    if not gamma > 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    if not delta > 0:
        raise ValueError(f"drift must be > 0 for a passage approximation, got {delta}")
    if not rho_sq > 0:
        raise ValueError(f"rho_sq must be > 0, got {rho_sq}")
    return PassageDistribution(mean=gamma / delta, variance=rho_sq * gamma / delta**3)


def folded_mean(m: float, v: float) -> float:
    """E|X| for X ~ N(m, v), by the folded-normal closed form."""
    if not v > 0:
        raise ValueError(f"v must be > 0, got {v}")
    s = math.sqrt(v)
    return float(
        s * math.sqrt(2.0 / math.pi) * math.exp(-m * m / (2.0 * v))
        + m * (1.0 - 2.0 * ndtr(-m / s))
    )
