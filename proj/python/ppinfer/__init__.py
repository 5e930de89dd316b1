"""Bayesian intensity estimation for replicated Poisson point processes."""

import json

from ._core import (
    ConfigError,
    DataError,
    DomainError,
    Error,
    EventSeries,
    IoError,
    LogicError,
    NumericalError,
    ParameterError,
    bin_counts,
    calibrate_beta,
    conjugate_band,
    exact_model_posterior,
    fit_report_json,
    log_marginal_likelihood,
    read_events,
    rule_of_thumb_bins,
    run_gmc,
    run_rj,
    select_bins,
    simulate,
)


def fit(data, method="conjugate", bins="rule", seed=None, iterations=30000, alpha=0.1, beta=0.1):
    """Run a fit and return the report as a dict (same schema as the CLI JSON)."""
    return json.loads(
        fit_report_json(data, method, str(bins), seed, iterations, alpha, beta)
    )


__all__ = [
    "ConfigError",
    "DataError",
    "DomainError",
    "Error",
    "EventSeries",
    "IoError",
    "LogicError",
    "NumericalError",
    "ParameterError",
    "bin_counts",
    "calibrate_beta",
    "conjugate_band",
    "exact_model_posterior",
    "fit",
    "log_marginal_likelihood",
    "read_events",
    "rule_of_thumb_bins",
    "run_gmc",
    "run_rj",
    "select_bins",
    "simulate",
]
