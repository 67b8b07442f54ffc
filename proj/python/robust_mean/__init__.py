"""Outlier-robust mean estimation: spectral filtering, median-of-means and stability checks."""

import json

from ._core import (
    ConvergenceError,
    ParseError,
    __version__,
    attack_strong,
    coord_median,
    empirical_mean,
    exact_stability_check,
    fit_loglog_slope,
    geometric_median,
    mom_filter_estimate,
    sample,
    sufficient_check_cov,
    top_eigenpair,
    universal_filter,
    weighted_mean,
)
from ._core import run_experiment as _run_experiment


def run_experiment(config, workers=1):
    """Run a Monte Carlo experiment. `config` is a dict or a JSON string; returns the report dict."""
    text = config if isinstance(config, str) else json.dumps(config)
    return json.loads(_run_experiment(text, workers))


__all__ = [
    "ConvergenceError",
    "ParseError",
    "attack_strong",
    "coord_median",
    "empirical_mean",
    "exact_stability_check",
    "fit_loglog_slope",
    "geometric_median",
    "mom_filter_estimate",
    "run_experiment",
    "sample",
    "sufficient_check_cov",
    "top_eigenpair",
    "universal_filter",
    "weighted_mean",
]
