"""Spectral analysis of 2x2 Dirac-type boundary value problems."""

from .core import (
    BoundaryPair,
    DiracProblem,
    PotentialGrid,
    ReducedBC,
    Strip,
    Weights,
    adjoint_problem,
    boundary_preset,
    check_regularity,
    gauge_reduce,
    reduce_bc,
)

__version__ = "0.1.0"

__all__ = [
    "BoundaryPair",
    "DiracProblem",
    "PotentialGrid",
    "ReducedBC",
    "Strip",
    "Weights",
    "adjoint_problem",
    "boundary_preset",
    "check_regularity",
    "gauge_reduce",
    "reduce_bc",
]
