"""Truncation-dimension multilevel Monte Carlo estimators."""

from ._core import (
    ChainModel,
    ConfigError,
    CostLedger,
    DecayReport,
    DegenerateError,
    EstimateRecord,
    EstimateSummary,
    Integrand,
    LevelSchedule,
    NumericalError,
    UniformStream,
    UnsupportedError,
    VarianceProfile,
    __version__,
    analytic_profile,
    chain_integrand,
    check_drift,
    estimate,
    geometric_coefficients,
    lindley_preset,
    make_additive,
    make_product,
    markov_schedule,
    mc_profile,
    measure_decay,
    replicate,
    replicate_markov,
    run_cli,
    samples_needed,
    simulate_chain,
    tilde_phi_variance_bound,
    total_budget,
    truncation_schedule,
    work_normalized_variance,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
