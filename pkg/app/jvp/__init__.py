"""Jacobian-vector-product validation of the pruning drift."""
from app.jvp.directional import (
    CentralDifference,
    PerturbationVector,
    delta_theta,
    jvp_norm,
    rank_correlations,
    validate_first_order,
)

__all__ = [
    "CentralDifference",
    "PerturbationVector",
    "delta_theta",
    "jvp_norm",
    "rank_correlations",
    "validate_first_order",
]
