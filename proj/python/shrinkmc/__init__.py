"""Gibbs samplers for Bayesian group, sparse group and fused lasso regression."""

from ._shrinkmc import (
    DimensionError,
    DomainError,
    Error,
    NumericalError,
    autocorr,
    bench,
    build_fused_precision,
    build_group_cov,
    build_sparse_group_cov,
    conditional_sigma2_params,
    ess,
    ess_per_second,
    marginal_sigma2_params,
    run_chain,
    sample_gamma,
    sample_inverse_gamma,
    sample_inverse_gaussian,
    sample_mvn_precision,
    simulate,
    summarize,
)

__all__ = [
    "DimensionError",
    "DomainError",
    "Error",
    "NumericalError",
    "autocorr",
    "bench",
    "build_fused_precision",
    "build_group_cov",
    "build_sparse_group_cov",
    "conditional_sigma2_params",
    "ess",
    "ess_per_second",
    "marginal_sigma2_params",
    "run_chain",
    "sample_gamma",
    "sample_inverse_gamma",
    "sample_inverse_gaussian",
    "sample_mvn_precision",
    "simulate",
    "summarize",
]
