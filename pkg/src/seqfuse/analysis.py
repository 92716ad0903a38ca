"""Mean-path and error-probability approximations for the fusion tests.

The toolkit mirrors the structure of the detection delay itself: node
threshold crossings are approximately Gaussian, so the j-th transmission
onset is an order statistic of Gaussians; between onsets the fusion
statistic is a random walk with piecewise-constant drift, so its mean path
is a staircase and the delay approximation reads the crossing epoch off
that staircase. Error probabilities before the first onset come from
series over the per-slot crossing chance of the pre-transmission walk,
either directly (two-sided test) or through the exponential passage law of
the clamped walk whose rate solves a renewal integral equation.

All routines are pure and deterministic; simulation lives in montecarlo.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import logsumexp, ndtr, roots_legendre

from .distributions import (
    GaussianModel,
    Hypothesis,
    PassageDistribution,
    folded_mean,
    llr_stats_under,
    passage_approx,
)
from .errors import NumericError
from .local_node import BinaryEmission, QuantizedEmission

__all__ = [
    "EpochTable",
    "AsymptoticConstants",
    "order_statistic_means",
    "node_passage_distributions",
    "dualsprt_epochs",
    "dualsprt_edd_approx",
    "dualsprt_pmd_bounds",
    "csprt_epochs",
    "csprt_edd_approx",
    "csprt_noise_increment",
    "fredholm_lambda",
    "csprt_pmd_approx",
    "asymptotic_constants",
    "bayes_risk_constant",
    "theorem2_check_gaussian",
    "legendre_rate",
]


# ---------------------------------------------------------------------------
# quadrature helpers

@lru_cache(maxsize=8)
def _gl_nodes(n: int):
    return roots_legendre(n)


def _gauss_legendre(a: float, b: float, n: int):
    """Gauss-Legendre nodes and weights mapped onto [a, b]. Read-only."""
    t, w = _gl_nodes(n)
    half = 0.5 * (b - a)
    return half * t + 0.5 * (a + b), half * w


def _gauss_pdf(x, mean, variance):
    return np.exp(-0.5 * (x - mean) ** 2 / variance) / np.sqrt(
        2.0 * math.pi * variance
    )


# ---------------------------------------------------------------------------
# order statistics of node passage times

def _order_stat_cdfs(dists, x):
    """F_(j)(x) for j = 1..L, rows in j order, columns matching x.

    P(at least j of the L independent crossing times are <= x), assembled
    from the count distribution by one dynamic-programming pass over nodes.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    L = len(dists)
    dp = np.zeros((L + 1, x.size))
    dp[0] = 1.0
    for i, d in enumerate(dists):
        p = d.cdf(x)
        q = 1.0 - p
        for m in range(i + 1, 0, -1):
            dp[m] = dp[m] * q + dp[m - 1] * p
        dp[0] *= q
    tail = np.cumsum(dp[::-1], axis=0)[::-1]
    return tail[1:]


def order_statistic_means(dists, *, n_quad: int = 512, tail_sigmas: float = 8.0):
    """Expected j-th smallest of L independent Gaussian crossing times.

    Uses E[X] = int_0^inf (1 - F) dx - int_{-inf}^0 F dx on the window
    [min mean - k sigma, max mean + k sigma], where the rank CDFs carry no
    mass outside; the clipped parts of the two half-line integrals reduce
    to the constant max(lo, 0) + min(hi, 0).
    """
    dists = list(dists)
    if len(dists) < 1:
        raise ValueError("need at least one distribution")
    means = np.array([d.mean for d in dists])
    stds = np.array([d.std for d in dists])
    lo = float(np.min(means - tail_sigmas * stds))
    hi = float(np.max(means + tail_sigmas * stds))
    edge = _order_stat_cdfs(dists, np.array([lo, hi]))
    if edge[0, 0] > 1e-9 or edge[-1, 1] < 1.0 - 1e-9:
        raise NumericError(
            f"window [{lo:.4g}, {hi:.4g}] does not capture the passage tails; "
            "widen tail_sigmas"
        )
    out = np.full(len(dists), max(lo, 0.0) + min(hi, 0.0))
    if hi > 0.0:
        x, w = _gauss_legendre(max(lo, 0.0), hi, n_quad)
        out += ((1.0 - _order_stat_cdfs(dists, x)) * w).sum(axis=1)
    if lo < 0.0:
        x, w = _gauss_legendre(lo, min(hi, 0.0), n_quad)
        out -= (_order_stat_cdfs(dists, x) * w).sum(axis=1)
    return [float(v) for v in out]


# ---------------------------------------------------------------------------
# scenario plumbing shared by the mean-path routines

def _static_gains(scenario):
    """Fading draws a fresh gain per trial, so there is no single
    deterministic drift to build a mean path from; such scenarios are
    rejected."""
    if scenario.channel.gains is None:
        raise ValueError("mean-path analysis requires fixed channel gains, not fading")
    return scenario.channel.gains


def _observed_law(pair, gain: float, hypothesis: Hypothesis) -> GaussianModel:
    """Law of the data a node actually sees. The gain scales the H1 signal
    mean; H0 is signal-free, so the gain plays no role there. The node keeps
    testing its design pair either way (it is not told its gain)."""
    if hypothesis == Hypothesis.H0:
        return pair.f0
    if gain == 1.0:
        return pair.f1
    return GaussianModel(gain * pair.f1.mean, pair.f1.variance)


def _node_drift(scenario, l: int, gain: float, hypothesis: Hypothesis):
    pair = scenario.pairs[l]
    return llr_stats_under(pair, _observed_law(pair, gain, hypothesis))


def node_passage_distributions(scenario, hypothesis: Hypothesis):
    """Gaussian law of each node's own threshold-crossing time under the
    true hypothesis (gain-adjusted data against the node's design pair)."""
    if scenario.is_glr:
        raise ValueError("passage analysis applies to SPRT nodes only")
    dists = []
    for i, (gain, cfg) in enumerate(
        zip(_static_gains(scenario), scenario.node_configs)
    ):
        delta, rho_sq = _node_drift(scenario, i, gain, hypothesis)
        if hypothesis == Hypothesis.H1:
            if not delta > 0:
                raise ValueError(
                    f"node {i}: llr drift {delta:.4g} is not positive under H1"
                )
            dists.append(passage_approx(cfg.gamma1, delta, rho_sq))
        else:
            if not delta < 0:
                raise ValueError(
                    f"node {i}: llr drift {delta:.4g} is not negative under H0"
                )
            dists.append(passage_approx(cfg.gamma0, -delta, rho_sq))
    return dists


# ---------------------------------------------------------------------------
# epoch tables and the staircase delay approximation

def _rebuild_fbar(times, drifts, drift_before, convention, clamped, hypothesis):
    if clamped:
        floor = (lambda v: max(v, 0.0)) if hypothesis == Hypothesis.H1 else (
            lambda v: min(v, 0.0)
        )
    else:
        floor = lambda v: v
    out = np.empty(len(times))
    f = 0.0
    prev_t = 0.0
    if convention == "segment":
        d = drift_before
        for j, t in enumerate(times):
            f = floor(f + d * (t - prev_t))
            out[j] = f
            d = drifts[j]
            prev_t = t
    elif convention == "verbatim":
        for j, t in enumerate(times):
            f = floor(f + drifts[j] * (t - prev_t))
            out[j] = f
            prev_t = t
    else:
        raise ValueError(f"unknown convention {convention!r}")
    return out


@dataclass(frozen=True)
class EpochTable:
    """Piecewise-linear mean path of a fusion statistic.

    Row j is the epoch (E[T_j], drift right after T_j, mean level just
    before T_j), in the statistic's own signed units (negative drifts and
    levels under H0). ``drift_before`` is the drift on (0, T_1). The
    ``segment`` convention propagates each drift forward over the gap it
    rules; ``verbatim`` multiplies the post-epoch drift over the gap that
    ends at the epoch. ``clamped`` floors the mean path at zero toward the
    active boundary, matching a reflected statistic.
    """

    times: tuple
    drifts: tuple
    fbar: tuple
    drift_before: float
    hypothesis: Hypothesis
    convention: str = "segment"
    clamped: bool = False

    def __post_init__(self):
        n = len(self.times)
        if n < 1 or len(self.drifts) != n or len(self.fbar) != n:
            raise ValueError("times/drifts/fbar must be nonempty and equally long")
        if self.times[0] <= 0.0:
            raise ValueError("first epoch time must be positive")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("epoch times must be strictly increasing")
        if self.convention not in ("segment", "verbatim"):
            raise ValueError(f"unknown convention {self.convention!r}")
        self.validate()

    @property
    def epochs(self):
        return list(zip(self.times, self.drifts, self.fbar))

    def validate(self, tol: float = 1e-9) -> None:
        """Check that fbar is exactly the recursion of the stored drifts
        over the stored gaps (up to rounding)."""
        rebuilt = _rebuild_fbar(
            self.times,
            self.drifts,
            self.drift_before,
            self.convention,
            self.clamped,
            self.hypothesis,
        )
        if not np.allclose(rebuilt, np.asarray(self.fbar), rtol=tol, atol=tol):
            raise ValueError("fbar does not satisfy the mean-path recursion")


def _edd_staircase(table: EpochTable, beta: float) -> float:
    if not beta > 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    s = 1.0 if table.hypothesis == Hypothesis.H1 else -1.0
    times = table.times
    n = len(times)
    for j in range(n):
        d = s * table.drifts[j]
        if not d > 0:
            continue
        remaining = (beta - s * table.fbar[j]) / d
        gap = times[j + 1] - times[j] if j + 1 < n else math.inf
        if remaining < gap:
            return times[j] + remaining
    raise ValueError(
        "no epoch drifts toward the decision boundary; check the hypothesis"
    )


def dualsprt_epochs(
    scenario, hypothesis: Hypothesis, *, convention: str = "segment"
) -> EpochTable:
    """Epoch table of the two-sided fusion statistic.

    Transmission onsets are the order-statistic means of the node passage
    laws; the drift after j onsets evaluates the fusion log-ratio mean at
    the running sum of the j earliest nodes' binary amplitudes.
    """
    if scenario.fusion.algorithm != "dual_sprt":
        raise ValueError("scenario does not use the two-sided fusion test")
    if not isinstance(scenario.node_configs[0].emission, BinaryEmission):
        raise ValueError("epoch construction here requires binary emissions")
    dists = node_passage_distributions(scenario, hypothesis)
    times = order_statistic_means(dists)
    order = np.argsort([d.mean for d in dists], kind="stable")
    af, bf = scenario.fusion.dual_coefficients()
    mz = scenario.fusion.noise.mean
    level = 0.0
    drifts = []
    for l in order:
        rule = scenario.node_configs[l].emission
        level += rule.b1 if hypothesis == Hypothesis.H1 else rule.b0
        drifts.append(af * (level + mz) + bf)
    sign = 1.0 if hypothesis == Hypothesis.H1 else -1.0
    if not any(sign * d > 0 for d in drifts):
        raise ValueError("no transmission count gives fusion drift toward the boundary")
    drift_before = af * mz + bf
    fbar = _rebuild_fbar(
        times, drifts, drift_before, convention, False, hypothesis
    )
    return EpochTable(
        times=tuple(times),
        drifts=tuple(drifts),
        fbar=tuple(float(v) for v in fbar),
        drift_before=drift_before,
        hypothesis=hypothesis,
        convention=convention,
        clamped=False,
    )


def dualsprt_edd_approx(table: EpochTable, beta: float) -> float:
    """Mean decision delay read off the staircase: the first epoch whose
    drift reaches beta before the next epoch, plus the linear remainder."""
    return _edd_staircase(table, beta)


# ---------------------------------------------------------------------------
# error series for the two-sided fusion statistic

def _no_transmission_survival(dists, k_max=None, tol: float = 1e-6):
    """P(no node has crossed by slot k) = prod_l (1 - Phi_l(k)), k = 1..K.

    K is k_max when given (warning if the tail is still above tol), else
    the first k where the product drops below tol.
    """

    def survival(upto):
        ks = np.arange(1, upto + 1, dtype=float)
        surv = np.ones(upto)
        for d in dists:
            surv *= 1.0 - d.cdf(ks)
        return surv

    if k_max is not None:
        if k_max < 1:
            raise ValueError(f"k_max must be >= 1, got {k_max}")
        surv = survival(int(k_max))
        if surv[-1] >= tol:
            warnings.warn(
                f"k_max={k_max} leaves P(no transmission) = {surv[-1]:.3g} "
                f">= {tol}; the series is truncated early",
                stacklevel=3,
            )
        return surv
    k = 64
    while True:
        surv = survival(k)
        below = np.nonzero(surv < tol)[0]
        if below.size:
            return surv[: below[0] + 1]
        if k >= 1_000_000:
            warnings.warn(
                "no-transmission survival stayed above tolerance out to k=1e6; "
                "series truncated there",
                stacklevel=3,
            )
            return surv
        k *= 2


def dualsprt_pmd_bounds(
    scenario,
    beta: float,
    k_max=None,
    hypothesis: Hypothesis = Hypothesis.H1,
    *,
    n_quad: int = 256,
):
    """Bounds on the probability that the fusion statistic crosses the wrong
    boundary before any node transmits.

    Term k is (chance the walk first dips past -beta at slot k, given it
    stayed above up to k-1) times P(no transmission by k). The lower bound
    keeps the stay-above factor max(0, 1 - 2 P[F_{k-1} <= -beta]); the upper
    bound relaxes it to P[F_{k-1} > -beta]. Requires the pre-transmission
    increments to be zero-mean (symmetric design), so the same series serves
    the opposite boundary under H0 with that hypothesis' passage laws.
    """
    if scenario.fusion.algorithm != "dual_sprt":
        raise ValueError("scenario does not use the two-sided fusion test")
    if not beta > 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    fus = scenario.fusion
    af, bf = fus.dual_coefficients()
    m_pre = af * fus.noise.mean + bf
    v = af * af * fus.noise.variance
    sd = math.sqrt(v)
    if abs(m_pre) > 1e-9 * sd:
        raise ValueError(
            "series bounds need zero-mean pre-transmission increments, got mean "
            f"{m_pre:.4g}; use a symmetric design (mu1 == mu0, centered noise)"
        )
    dists = node_passage_distributions(scenario, hypothesis)
    surv = _no_transmission_survival(dists, k_max)
    lower = upper = float(ndtr(-beta / sd)) * float(surv[0])
    if len(surv) >= 2:
        ks = np.arange(2, len(surv) + 1, dtype=float)
        sk = np.sqrt((ks - 1.0) * v)
        c, w = _gauss_legendre(0.0, 9.0 * sd, n_quad)
        p_xi = ndtr(-c / sd)
        dens = _gauss_pdf((c - beta)[None, :], 0.0, 1.0 * sk[:, None] ** 2)
        inner = dens @ (w * p_xi)
        p_below = ndtr(-beta / sk)
        lower += float(np.sum(inner * np.maximum(0.0, 1.0 - 2.0 * p_below) * surv[1:]))
        upper += float(np.sum(inner * (1.0 - p_below) * surv[1:]))
    return min(1.0, lower), min(1.0, upper)


# ---------------------------------------------------------------------------
# clamped-pair analysis

def csprt_epochs(
    scenario, hypothesis: Hypothesis, *, convention: str = "segment"
) -> EpochTable:
    """Epoch table of the correct-side clamped statistic.

    Onsets are the ordered passage means as in dualsprt_epochs; between an
    onset and the next, that node climbs one quantization band per
    delta/drift slots, each climb adding a sub-epoch while it lands before
    the next onset (the band then stays frozen). Drifts evaluate the
    one-sided log-ratio mean at the sum of the live amplitude levels, and
    the mean path is floored at zero because the statistic is clamped.
    """
    if scenario.fusion.algorithm != "csprt":
        raise ValueError("scenario does not use the clamped-pair fusion test")
    if not isinstance(scenario.node_configs[0].emission, QuantizedEmission):
        raise ValueError("epoch construction here requires quantized emissions")
    dists = node_passage_distributions(scenario, hypothesis)
    onsets = order_statistic_means(dists)
    order = np.argsort([d.mean for d in dists], kind="stable")
    gains = _static_gains(scenario)
    under_h1 = hypothesis == Hypothesis.H1

    events = []  # (time, node, band 1..4)
    for i, l in enumerate(order):
        rule = scenario.node_configs[l].emission
        delta, _ = _node_drift(scenario, l, gains[l], hypothesis)
        spacing = (rule.delta1 / delta) if under_h1 else (rule.delta0 / -delta)
        t0 = onsets[i]
        t_next = onsets[i + 1] if i + 1 < len(onsets) else math.inf
        events.append((t0, l, 1))
        for j in (1, 2, 3):
            tj = t0 + j * spacing
            if not tj < t_next:
                break
            events.append((tj, l, j + 1))
    events.sort(key=lambda e: e[0])

    fus = scenario.fusion
    a, b = fus.up_coefficients() if under_h1 else fus.down_coefficients()
    mz = fus.noise.mean
    bands = [0] * scenario.n_nodes
    times = []
    drifts = []
    i = 0
    while i < len(events):
        t = events[i][0]
        while i < len(events) and events[i][0] - t <= 1e-9 * max(1.0, abs(t)):
            _, l, band = events[i]
            bands[l] = band
            i += 1
        total = 0.0
        for l, band in enumerate(bands):
            if band > 0:
                rule = scenario.node_configs[l].emission
                total += rule.levels_up[band - 1] if under_h1 else rule.levels_down[band - 1]
        times.append(t)
        drifts.append(a * (total + mz) + b)
    sign = 1.0 if under_h1 else -1.0
    if not any(sign * d > 0 for d in drifts):
        raise ValueError("no epoch gives fusion drift toward the boundary")
    drift_before = a * mz + b
    fbar = _rebuild_fbar(times, drifts, drift_before, convention, True, hypothesis)
    return EpochTable(
        times=tuple(times),
        drifts=tuple(drifts),
        fbar=tuple(float(v) for v in fbar),
        drift_before=drift_before,
        hypothesis=hypothesis,
        convention=convention,
        clamped=True,
    )


def csprt_edd_approx(table: EpochTable, beta: float) -> float:
    """Staircase crossing-time approximation on the merged epoch table."""
    return _edd_staircase(table, beta)


def csprt_noise_increment(scenario, hypothesis: Hypothesis = Hypothesis.H1) -> GaussianModel:
    """Law of the increment driving the error-side clamped statistic under
    pure channel noise, oriented so its boundary sits at -beta.

    Under H1 the error side is the down statistic, whose raw increment
    already points at -beta0. Under H0 it is the up statistic at +beta1;
    negating it moves the problem into the same frame.
    """
    fus = scenario.fusion
    if fus.algorithm != "csprt":
        raise ValueError("scenario does not use the clamped-pair fusion test")
    mz, vz = fus.noise.mean, fus.noise.variance
    if hypothesis == Hypothesis.H1:
        a, b = fus.down_coefficients()
        return GaussianModel(a * mz + b, a * a * vz)
    a, b = fus.up_coefficients()
    return GaussianModel(-(a * mz + b), a * a * vz)


def _fredholm_l0(beta: float, inc: GaussianModel, n: int) -> float:
    # n counts intervals; composite Simpson needs it even.
    if n % 2:
        n += 1
    u = np.linspace(-beta, 0.0, n + 1)
    h = beta / n
    w = np.full(n + 1, h / 3.0)
    w[1:-1:2] *= 4.0
    w[2:-1:2] *= 2.0
    kern = w * _gauss_pdf(u[None, :] - u[:, None], inc.mean, inc.variance)
    kern[:, -1] += inc.sf(-u)
    try:
        sol = np.linalg.solve(np.eye(n + 1) - kern, np.ones(n + 1))
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"collocation system is singular: {exc}") from None
    return float(sol[-1])


_FREDHOLM_MAX_GRID = 3200


def fredholm_lambda(beta: float, noise_increment: GaussianModel, *, n_grid: int = 400):
    """Mean time L(0) for the clamped walk to first reach -beta, and the
    exponential passage rate 1/L(0).

    L(s) = P(S > -s)(L(0) + 1) + int_{-beta-s}^{-s} (L(s+z) + 1) dF_S(z)
           + F_S(-beta - s)

    is a Fredholm equation of the second kind for the mean absorption time
    started from s; it is collocated on a uniform grid over [-beta, 0] with
    composite Simpson weights. The linear system amplifies quadrature error
    by roughly L(0) itself, so second-order weights stall on hard instances;
    fourth order keeps the mandatory stability check affordable. The grid is
    doubled until L(0) moves by less than 0.5%, and the finer value is
    returned; failure to settle before the refinement cap raises.
    """
    if not beta > 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    if n_grid < 16:
        raise ValueError(f"n_grid too small to resolve the kernel, got {n_grid}")
    n = int(n_grid)
    coarse = _fredholm_l0(beta, noise_increment, n)
    while True:
        n *= 2
        fine = _fredholm_l0(beta, noise_increment, n)
        if not (math.isfinite(fine) and fine > 0.0):
            raise NumericError(f"mean passage time came out {fine!r}")
        if abs(fine - coarse) <= 0.005 * abs(fine):
            return fine, 1.0 / fine
        if n >= _FREDHOLM_MAX_GRID:
            raise NumericError(
                f"grid doubling moved L(0) from {coarse:.6g} to {fine:.6g} "
                f"at {n} intervals; the increment law resists this resolution"
            )
        coarse = fine


def csprt_pmd_approx(lambda_beta: float, dists, k_max=None, *, series: str = "corrected"):
    """Chance that the error-side clamped statistic is absorbed before the
    first node transmission, from its exponential passage law.

    series="corrected" weights P(no transmission by k) by the per-slot
    absorption mass exp(-lam (k-1)) - exp(-lam k), which telescopes to at
    most 1. series="as-written" accumulates the absorption CDF
    (1 - exp(-lam k)) directly; it over-counts and is kept for comparison,
    capped at 1 with a warning.
    """
    if not lambda_beta > 0:
        raise ValueError(f"lambda_beta must be > 0, got {lambda_beta}")
    if series not in ("corrected", "as-written"):
        raise ValueError(f"unknown series variant {series!r}")
    surv = _no_transmission_survival(dists, k_max)
    k = np.arange(1, len(surv) + 1, dtype=float)
    if series == "corrected":
        pmf = np.exp(-lambda_beta * (k - 1.0)) - np.exp(-lambda_beta * k)
        total = float(np.sum(pmf * surv))
    else:
        total = float(np.sum((1.0 - np.exp(-lambda_beta * k)) * surv))
    if total > 1.0:
        warnings.warn(
            f"series value {total:.4g} exceeds 1; capped at the probability bound",
            stacklevel=2,
        )
        total = 1.0
    return total


# ---------------------------------------------------------------------------
# asymptotic constants and conditions

@dataclass(frozen=True)
class AsymptoticConstants:
    """Slope constants of the large-threshold delay expansion.

    d_tot0/d_tot1 are the summed node divergences; r/rho the per-node
    shares; delta_a0/delta_a1 the fusion drifts when every node transmits
    its H0/H1 amplitude; exi_star0/exi_star1 the folded means of the
    all-nodes-wrong fusion increment; m0/m1 the resulting delay-per-log-
    error slopes.
    """

    d_tot0: float
    d_tot1: float
    r: tuple
    rho: tuple
    delta_a0: float
    delta_a1: float
    exi_star0: float
    exi_star1: float
    m0: float
    m1: float

    def __post_init__(self):
        if not (self.d_tot0 > 0 and self.d_tot1 > 0):
            raise ValueError("total divergences must be positive")
        if self.m0 < 0 or self.m1 < 0:
            raise ValueError("slope constants must be nonnegative")


def asymptotic_constants(scenario) -> AsymptoticConstants:
    """Assemble the delay-slope constants for a binary-emission scenario.

    The worst-case residual after the wrong-side boundary would have been
    hit is a fusion increment with every node transmitting the wrong
    amplitude; its folded mean enters the slope through
    m1 = (1 + E|xi*| / d_tot1) / delta_a1 and the mirrored m0.
    """
    if scenario.fusion.algorithm != "dual_sprt":
        raise ValueError("asymptotic constants apply to the two-sided fusion test")
    if scenario.is_glr or not isinstance(
        scenario.node_configs[0].emission, BinaryEmission
    ):
        raise ValueError("asymptotic constants require binary-emission SPRT nodes")
    gains = _static_gains(scenario)
    per0 = [
        -_node_drift(scenario, l, g, Hypothesis.H0)[0] for l, g in enumerate(gains)
    ]
    per1 = [
        _node_drift(scenario, l, g, Hypothesis.H1)[0] for l, g in enumerate(gains)
    ]
    d0 = float(sum(per0))
    d1 = float(sum(per1))
    if min(per0) <= 0 or min(per1) <= 0:
        raise ValueError("every node must drift toward the true hypothesis")
    fus = scenario.fusion
    af, bf = fus.dual_coefficients()
    mz, vz = fus.noise.mean, fus.noise.variance
    sum_b1 = sum(c.emission.b1 for c in scenario.node_configs)
    sum_b0 = sum(c.emission.b0 for c in scenario.node_configs)
    delta_a1 = af * (sum_b1 + mz) + bf
    delta_a0 = af * (sum_b0 + mz) + bf
    if not (delta_a1 > 0 and delta_a0 < 0):
        raise ValueError(
            f"need fusion drifts delta_a1 > 0 > delta_a0, got "
            f"({delta_a1:.4g}, {delta_a0:.4g})"
        )
    v = af * af * vz
    exi_star1 = folded_mean(delta_a0, v)
    exi_star0 = folded_mean(delta_a1, v)
    return AsymptoticConstants(
        d_tot0=d0,
        d_tot1=d1,
        r=tuple(k / d0 for k in per0),
        rho=tuple(k / d1 for k in per1),
        delta_a0=delta_a0,
        delta_a1=delta_a1,
        exi_star0=exi_star0,
        exi_star1=exi_star1,
        m0=-(1.0 + exi_star0 / d0) / delta_a0,
        m1=(1.0 + exi_star1 / d1) / delta_a1,
    )


def bayes_risk_constant(constants: AsymptoticConstants, prior_h0: float) -> float:
    """Leading constant m0 pi + m1 (1 - pi) of the mixed-delay slope."""
    if not 0.0 <= prior_h0 <= 1.0:
        raise ValueError(f"prior must lie in [0, 1], got {prior_h0}")
    return constants.m0 * prior_h0 + constants.m1 * (1.0 - prior_h0)


def theorem2_check_gaussian(scenario, eta_grid=None):
    """Scan the Gaussian sufficient condition for the error exponents.

    For homogeneous nodes with symmetric binary design, the condition is
    sigma_fc^2 eta / (4 mu^2 sqrt(2 eta) + 2 mu L b) > 1 for some eta in
    (0, min(R0, R1)], R_i = delta_i^2 / (2 rho_i^2). Returns (holds,
    first witness eta or None).
    """
    gains = _static_gains(scenario)
    base = scenario.pairs[0]
    g = gains[0]
    for pr, gl in zip(scenario.pairs[1:], gains[1:]):
        if pr.f0 != base.f0 or pr.f1 != base.f1 or gl != g:
            raise ValueError("condition check requires identical node pairs and gains")
    if scenario.is_glr or not isinstance(
        scenario.node_configs[0].emission, BinaryEmission
    ):
        raise ValueError("condition check requires binary-emission SPRT nodes")
    rules = {(c.emission.b1, c.emission.b0) for c in scenario.node_configs}
    if len(rules) != 1:
        raise ValueError("condition check requires one common amplitude pair")
    b1, b0 = rules.pop()
    if abs(b1 + b0) > 1e-12 * max(1.0, abs(b1)):
        raise ValueError(f"amplitudes must be symmetric (b0 = -b1), got ({b1}, {b0})")
    fus = scenario.fusion
    if abs(fus.mu1 - fus.mu0) > 1e-12 * max(1.0, fus.mu1):
        raise ValueError("condition check requires the symmetric design mu1 == mu0")
    d1, rho1_sq = llr_stats_under(base, _observed_law(base, g, Hypothesis.H1))
    d0, rho0_sq = llr_stats_under(base, _observed_law(base, g, Hypothesis.H0))
    if not (d1 > 0 and d0 < 0):
        raise ValueError("degenerate node pair: no llr drift")
    cap = min(d0 * d0 / (2.0 * rho0_sq), d1 * d1 / (2.0 * rho1_sq))
    if eta_grid is None:
        eta_grid = np.linspace(0.0, cap, 257)[1:]
    else:
        eta_grid = np.asarray(eta_grid, dtype=float)
        if eta_grid.size == 0:
            raise ValueError("eta_grid must be nonempty")
        if np.any(eta_grid <= 0.0) or np.any(eta_grid > cap):
            raise ValueError(f"eta_grid must lie in (0, {cap:.6g}]")
    mu = fus.mu1
    L = scenario.n_nodes
    vals = fus.noise.variance * eta_grid / (
        4.0 * mu * mu * np.sqrt(2.0 * eta_grid) + 2.0 * mu * L * b1
    )
    hits = np.nonzero(vals > 1.0)[0]
    if hits.size:
        return True, float(eta_grid[hits[0]])
    return False, None


def legendre_rate(alpha: float, mgf_samples, *, lam_span: float = 64.0, n_grid: int = 513):
    """Empirical convex-conjugate rate sup_lam [alpha lam - log mean exp(lam X)].

    The objective is concave in lam, so a coarse bracket plus bounded scalar
    refinement finds the supremum. If the maximum sits on the grid edge the
    true supremum is likely unbounded (alpha outside the sample hull); a
    warning is raised and the edge value returned as-is.
    """
    x = np.asarray(mgf_samples, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("mgf_samples must be nonempty")
    if not np.all(np.isfinite(x)):
        raise ValueError("mgf_samples must be finite")
    log_n = math.log(x.size)

    def objective(lam):
        return alpha * lam - (float(logsumexp(lam * x)) - log_n)

    lams = np.linspace(-lam_span, lam_span, n_grid)
    vals = np.array([objective(l) for l in lams])
    i = int(np.argmax(vals))
    if i == 0 or i == n_grid - 1:
        warnings.warn(
            "rate objective still increasing at the lambda grid edge; "
            "supremum may be unbounded",
            stacklevel=2,
        )
        return float(vals[i])
    res = minimize_scalar(
        lambda l: -objective(l),
        bounds=(lams[i - 1], lams[i + 1]),
        method="bounded",
        options={"xatol": 1e-10},
    )
    return float(max(vals[i], -res.fun))
