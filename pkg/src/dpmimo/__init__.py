"""Downlink spectral efficiency of dual-polarized massive MIMO.

Single-cell model with a dual-polarized BS array and dual-polarized
single-antenna UEs: correlated Rayleigh channels with cross-polar
leakage, MMSE channel estimation from orthogonal pilots, MR and ZF
precoding, closed-form and Monte Carlo SE, plus a uni-polarized
baseline with half the antennas and pooled power.
"""

__version__ = "0.1.0"

from .channel import (
    DualPolChannel,
    UniPolChannel,
    empirical_xpd,
    sample_dual_channel,
    sample_dual_channels,
    sample_uni_channel,
    sample_uni_channels,
)
from .config import SystemConfig, config_digest, load_config
from .correlation import (
    CorrelationSet,
    XPDSpec,
    build_correlation_set,
    local_scattering_cov,
    polarized_covariances_via_sqrt,
    xpd_from_db,
)
from .errors import (
    ConfigError,
    DegenerateEstimateStatistics,
    DegenerateTrace,
    DimensionMismatch,
    GeometryInfeasible,
    IndefiniteEffectiveNoise,
    InsufficientSamples,
    NonPositiveDistance,
    NotHermitian,
    NotPSD,
    PilotBudgetExceeded,
    RankDeficient,
    SimulationError,
    Singular,
    TooManyUEs,
)
from .estimation import (
    ChannelEstimate,
    EstimationStatistics,
    UniEstimationStatistics,
    build_pilot_book,
    direct_joint_sampler,
    end_to_end_joint_sampler,
    estimation_statistics,
    mmse_estimate,
    process_pilots,
    sample_estimate_directly,
    uni_direct_joint_sampler,
    uni_estimation_statistics,
)
from .linalg import (
    check_hermitian,
    hermitian_psd_sqrt,
    hermitian_solve,
    sample_standard_complex_gaussian,
    symmetrize,
    trace_product,
)
from .precoding import (
    PrecoderSet,
    mr_precoder_dual,
    mr_precoder_uni,
    zf_precoder_dual,
    zf_precoder_uni,
)
from .scenario import Geometry, UEDrop, drop_ues, pathloss_db
from .se import (
    MonteCarloSpec,
    SEReport,
    closed_form_se_mr,
    monte_carlo_se,
    simplified_se_uncorrelated,
    uni_closed_form_se_mr,
)
from .validation import ValidationReport, run_validation

__all__ = [
    "__version__",
    "ChannelEstimate",
    "ConfigError",
    "CorrelationSet",
    "DegenerateEstimateStatistics",
    "DegenerateTrace",
    "DimensionMismatch",
    "DualPolChannel",
    "EstimationStatistics",
    "Geometry",
    "GeometryInfeasible",
    "IndefiniteEffectiveNoise",
    "InsufficientSamples",
    "MonteCarloSpec",
    "NonPositiveDistance",
    "NotHermitian",
    "NotPSD",
    "PilotBudgetExceeded",
    "PrecoderSet",
    "RankDeficient",
    "SEReport",
    "SimulationError",
    "Singular",
    "SystemConfig",
    "TooManyUEs",
    "UEDrop",
    "UniEstimationStatistics",
    "UniPolChannel",
    "ValidationReport",
    "XPDSpec",
    "build_correlation_set",
    "build_pilot_book",
    "check_hermitian",
    "closed_form_se_mr",
    "config_digest",
    "direct_joint_sampler",
    "drop_ues",
    "empirical_xpd",
    "end_to_end_joint_sampler",
    "estimation_statistics",
    "hermitian_psd_sqrt",
    "hermitian_solve",
    "load_config",
    "local_scattering_cov",
    "mmse_estimate",
    "monte_carlo_se",
    "mr_precoder_dual",
    "mr_precoder_uni",
    "pathloss_db",
    "polarized_covariances_via_sqrt",
    "process_pilots",
    "run_validation",
    "sample_dual_channel",
    "sample_dual_channels",
    "sample_estimate_directly",
    "sample_standard_complex_gaussian",
    "sample_uni_channel",
    "sample_uni_channels",
    "simplified_se_uncorrelated",
    "symmetrize",
    "trace_product",
    "uni_closed_form_se_mr",
    "uni_direct_joint_sampler",
    "uni_estimation_statistics",
    "xpd_from_db",
    "zf_precoder_dual",
    "zf_precoder_uni",
]
