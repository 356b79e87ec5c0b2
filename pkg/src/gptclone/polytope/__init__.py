"""Dual-description polytopes, cones and exact linear feasibility."""
from .lp import Constraint, LPResult, eq, ge, le, lp_feasible, membership_constraints
from .polytope import (
    Cone,
    Containment,
    Polytope,
    UnboundedError,
    affine_dim,
    cone_from_inequalities,
    contains,
    format_inequality,
    hrep_to_vrep,
    is_simplex,
    vrep_to_hrep,
)

__all__ = [
    "Cone",
    "Constraint",
    "Containment",
    "LPResult",
    "Polytope",
    "UnboundedError",
    "affine_dim",
    "cone_from_inequalities",
    "contains",
    "eq",
    "format_inequality",
    "ge",
    "hrep_to_vrep",
    "is_simplex",
    "le",
    "lp_feasible",
    "membership_constraints",
    "vrep_to_hrep",
]
