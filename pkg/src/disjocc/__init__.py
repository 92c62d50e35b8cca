"""Exact computation and verification of disjoint occurrence of events."""

from .space import Factor, ProductSpace, enumerate_outcomes, is_linear, is_positively_associated, leq, measure, validate_factor
from .events import (
    Event,
    affects,
    are_independent,
    contains,
    is_decreasing,
    is_increasing,
    is_witness,
    minimal_witnesses,
    probability,
    psi,
)
from .disjoint import (
    CountDistribution,
    DisjointnessCertificate,
    X_at,
    X_distribution,
    Y_distribution,
    Z_at,
    Z_distribution,
    box_event,
    box_occurs_at,
    stochastically_dominates,
)

__version__ = "0.1.0"
