"""Kernel-feature-map few-shot learning: classifier, probability bounds, Monte Carlo checks."""

from kfs.bounds import (
    BoundParams,
    BoundValue,
    DimensionProfile,
    beta_at,
    delta_feasible,
    lhd_l,
    lhd_two_sided_prob,
    lhd_u,
    lhd_upper_prob,
    optimize_delta_theta,
    p_e_bound,
    p_n_bound,
    quasi_orth_bound,
    quasi_orth_norm_bound,
)
from kfs.errors import (
    DegenerateInputError,
    DimensionMismatchError,
    DomainError,
    InfeasibleError,
    PSDViolationError,
    UnsupportedRegimeError,
)
from kfs.fewshot import (
    Cascade,
    ConstantPredictor,
    FewShotModel,
    Optimize,
    classify,
    fit,
    margin,
)
from kfs.kernels import (
    Kernel,
    SupportSample,
    d_statistic,
    feature_cosine,
    feature_distance_sq,
    mean_score,
)

__version__ = "0.1.0"

__all__ = [
    "BoundParams",
    "BoundValue",
    "Cascade",
    "ConstantPredictor",
    "DegenerateInputError",
    "DimensionMismatchError",
    "DimensionProfile",
    "DomainError",
    "FewShotModel",
    "InfeasibleError",
    "Kernel",
    "Optimize",
    "PSDViolationError",
    "SupportSample",
    "UnsupportedRegimeError",
    "beta_at",
    "classify",
    "d_statistic",
    "delta_feasible",
    "feature_cosine",
    "feature_distance_sq",
    "fit",
    "lhd_l",
    "lhd_two_sided_prob",
    "lhd_u",
    "lhd_upper_prob",
    "margin",
    "mean_score",
    "optimize_delta_theta",
    "p_e_bound",
    "p_n_bound",
    "quasi_orth_bound",
    "quasi_orth_norm_bound",
]
