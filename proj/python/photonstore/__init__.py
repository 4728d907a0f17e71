"""Optimal storage and retrieval of photons in atomic ensembles."""

from ._photonstore import (
    NumericalError,
    ValidationError,
    breakdown_efficiency,
    fast_retrieve,
    optimal_backward_mode,
    optimal_forward_mode,
    optimal_nondegenerate_mode,
    retrieval_efficiency,
    run_config,
    square_control_efficiency,
)

__all__ = [
    "NumericalError",
    "ValidationError",
    "breakdown_efficiency",
    "fast_retrieve",
    "optimal_backward_mode",
    "optimal_forward_mode",
    "optimal_nondegenerate_mode",
    "retrieval_efficiency",
    "run_config",
    "square_control_efficiency",
]
