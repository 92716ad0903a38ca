"""Decentralized sequential detection over a noisy reporting channel.

Sensors run local sequential tests and transmit coarse amplitudes over a
shared additive channel; the fusion center runs its own sequential test on
the noisy sum. The package provides the simulator (montecarlo), the
analytical approximations (analysis), and a scenario-driven CLI.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .analysis import (
    AsymptoticConstants,
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
from .channel import (
    ChannelConfig,
    EnergyDetectorModel,
    RayleighFading,
    energy_detector_pair,
    mac_fuse,
    observation,
)
from .distributions import (
    GaussianModel,
    Hypothesis,
    HypothesisPair,
    PassageDistribution,
    drift_stats,
    folded_mean,
    kl_divergence,
    llr,
    llr_stats_under,
    passage_approx,
)
from .errors import NumericError, SchemaError, SeqfuseError
from .fusion import (
    CsprtState,
    DualSprtState,
    FusionConfig,
    fc_llr_csprt,
    fc_llr_dual,
    fusion_step,
    initial_state,
)
from .local_node import (
    BinaryEmission,
    GlrNodeConfig,
    GlrNodeState,
    IntervalQuantizedEmission,
    LocalNodeState,
    QuantizedEmission,
    SprtNodeConfig,
    default_quantized_emission,
    glr_emission,
    glr_update,
    solve_theta_star,
    sprt_emission,
    sprt_update,
)
from .montecarlo import (
    Decision,
    PerformanceEstimate,
    Scenario,
    TrialResult,
    estimate,
    mean_statistic_path,
    run_trial,
    sweep,
)

__version__ = "0.1.0"
