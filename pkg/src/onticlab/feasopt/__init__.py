"""Optimization engine: LP feasibility with certificates, alternating
bilinear search, and exhaustive noncontextual-assignment search."""

from .kernel import BACKEND
from .ksrays import RaySet, RayValidationReport, ks_assignment_count, validate_ray_set
from .linprog import (
    LinearProgram,
    LPOutcome,
    SimplexError,
    simplex_solve,
    verify_certificate,
)
from .problem import (
    AlternationReport,
    FeasibilityProblem,
    alternate_search,
    solve_responses,
    solve_rho,
    target_matrix,
)

__all__ = [
    "BACKEND",
    "AlternationReport",
    "FeasibilityProblem",
    "LinearProgram",
    "LPOutcome",
    "RaySet",
    "RayValidationReport",
    "SimplexError",
    "alternate_search",
    "ks_assignment_count",
    "simplex_solve",
    "solve_responses",
    "solve_rho",
    "target_matrix",
    "validate_ray_set",
    "verify_certificate",
]
