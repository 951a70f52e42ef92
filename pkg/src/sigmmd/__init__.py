"""Two-sample testing for stochastic processes with signature-kernel MMD."""

import os

__version__ = "0.1.0"

# single-core friendly threading layer; also silences TBB version probing
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

from .errors import (
    CapacityError,
    ConfigError,
    DataError,
    InvalidPathError,
    NumericalError,
    SigmmdError,
)
from .paths import Path, concat, total_variation
from .signature import SignatureTensor, chen_product, level_norm, signature, signatures
from .static_kernels import StaticKernel, cross_gram, evaluate, linear_kernel, rbf_kernel
from .sig_kernel import (
    GramMatrix,
    PDEBackend,
    TruncatedBackend,
    WeightFunction,
    geometric_weights,
    gram,
    pde_kernel,
    scale_then_kernel_identity_check,
    table_weights,
    truncated_kernel,
    unit_weights,
)
from .mmd import MMDEstimate, estimate, gamma_hat, lambda_hat, truncated_phi_mmd
from .preprocess import (
    LeadLag,
    Pipeline,
    Scale,
    Standardize,
    TimeAugment,
    lead_lag,
    scale,
    standardize,
    terminal_stats,
    time_augment,
)
from .simulate import (
    GBM,
    OU,
    Garch,
    MixtureGBMOU,
    ScaledBM,
    SimSpec,
    multichannel_batch,
    simulate_batch,
    simulate_values,
)
from .studies import (
    ReturnsDecision,
    dimension_study,
    garch_type2_study,
    mixture_type2_study,
    returns_decision,
    scaled_bm_type1_study,
    scaled_bm_type2_study,
)
from .two_sample import (
    EmpiricalDistribution,
    GammaNull,
    PowerRow,
    PowerStudyConfig,
    StatisticConfig,
    TestResult,
    TwoSampleConfig,
    bootstrap_alternative,
    bootstrap_null,
    gamma_null_fit,
    gamma_p_value,
    gamma_threshold,
    gaussian_alt_params,
    level_contribution_samples,
    permutation_null,
    power_study,
    quantile,
    two_sample_test,
    type1_probability,
    type2_probability,
)

__all__ = [
    "CapacityError", "ConfigError", "DataError", "InvalidPathError",
    "NumericalError", "SigmmdError", "Path", "concat", "total_variation",
    "SignatureTensor", "chen_product", "level_norm", "signature", "signatures",
    "StaticKernel", "cross_gram", "evaluate", "linear_kernel", "rbf_kernel",
    "GramMatrix", "PDEBackend", "TruncatedBackend", "WeightFunction",
    "geometric_weights", "gram", "pde_kernel", "scale_then_kernel_identity_check",
    "table_weights", "truncated_kernel", "unit_weights",
    "MMDEstimate", "estimate", "gamma_hat", "lambda_hat", "truncated_phi_mmd",
    "LeadLag", "Pipeline", "Scale", "Standardize", "TimeAugment",
    "lead_lag", "scale", "standardize", "terminal_stats", "time_augment",
    "GBM", "OU", "Garch", "MixtureGBMOU", "ScaledBM", "SimSpec",
    "multichannel_batch", "simulate_batch", "simulate_values",
    "EmpiricalDistribution", "GammaNull", "PowerRow", "PowerStudyConfig",
    "StatisticConfig", "TestResult", "TwoSampleConfig", "bootstrap_alternative",
    "bootstrap_null", "gamma_null_fit", "gamma_p_value", "gamma_threshold",
    "gaussian_alt_params", "level_contribution_samples", "permutation_null",
    "power_study", "quantile", "two_sample_test", "type1_probability",
    "type2_probability",
    "ReturnsDecision", "dimension_study", "garch_type2_study",
    "mixture_type2_study", "returns_decision", "scaled_bm_type1_study",
    "scaled_bm_type2_study",
]
