"""Python bindings for the levyou library."""

import json as _json

from ._levyou import (
    ConfigError,
    NumericError,
    SpectralOperator,
    Subordinator,
    apriori_constants,
    critical_exponent,
    finite_variation,
    holder_exponent,
    laplace_exponent,
    list_experiments,
    noise_charfn,
    ou_charfn,
    ou_charfn_empirical,
    run_experiment,
    sample_field,
    solve_burgers,
    subordinator_values,
)


def run(config):
    """Run an experiment from a config dict; returns (exit_code, report dict)."""
    code, report = run_experiment(_json.dumps(config))
    return code, _json.loads(report)


__all__ = [
    "ConfigError",
    "NumericError",
    "SpectralOperator",
    "Subordinator",
    "apriori_constants",
    "critical_exponent",
    "finite_variation",
    "holder_exponent",
    "laplace_exponent",
    "list_experiments",
    "noise_charfn",
    "ou_charfn",
    "ou_charfn_empirical",
    "run",
    "run_experiment",
    "sample_field",
    "solve_burgers",
    "subordinator_values",
]
