"""VRJP simulation and verification lab (compiled core)."""

from ._vrjp import (
    DomainError,
    GraphError,
    NotPositiveDefinite,
    density,
    gamma_half_cdf,
    green,
    ks_test,
    laplace,
    sample_beta,
    simulate_vrjp,
    standard_rep_rates,
    tree_identities,
    verify,
)

__all__ = [
    "DomainError",
    "GraphError",
    "NotPositiveDefinite",
    "density",
    "gamma_half_cdf",
    "green",
    "ks_test",
    "laplace",
    "sample_beta",
    "simulate_vrjp",
    "standard_rep_rates",
    "tree_identities",
    "verify",
]
