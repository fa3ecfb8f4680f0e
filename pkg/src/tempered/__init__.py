"""Operator-field models of tempered representation data on finite grids.

The package builds finite, fully checkable stand-ins for the analytic
objects of tempered harmonic analysis: algebras of equivariant operator
fields over character grids, induction/restriction bimodules between them,
and the Plancherel-layer pairings that tie the two sides together.  Every
construction is dense linear algebra, so each structural identity is
verified numerically rather than assumed.
"""

from .core import (
    BaseSpace,
    FiberedSpace,
    FiniteGroup,
    OperatorField,
    ProjectiveAction,
    VectorField,
    rank_one,
)

__all__ = [
    "BaseSpace",
    "FiberedSpace",
    "FiniteGroup",
    "OperatorField",
    "ProjectiveAction",
    "VectorField",
    "rank_one",
]

__version__ = "0.1.0"
