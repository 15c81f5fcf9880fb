"""Projection onto intersections of linear preimages of convex sets.

Given an anchor ``v`` and blocks ``(A_i, C_i)``, find the point of
``{x : A_i x in C_i for all i}`` nearest to ``v`` with a Dykstra-type sweep
that only needs projections onto each ``C_i``.
"""
from . import kernels, oracle, rates, sets
from .errors import (
    DescentViolation,
    DimensionError,
    InfeasibleError,
    ProblemFileError,
    ProjectionError,
)
from .model import Instance, compute_gamma, dual_objective, primal_from_dual, residual_map
from .solver import SolverConfig, SolveResult, solve, sweep_cgd_reference, sweep_dykstra

__version__ = "0.1.0"

__all__ = [
    "kernels",
    "oracle",
    "rates",
    "sets",
    "Instance",
    "compute_gamma",
    "dual_objective",
    "primal_from_dual",
    "residual_map",
    "SolverConfig",
    "SolveResult",
    "solve",
    "sweep_dykstra",
    "sweep_cgd_reference",
    "DescentViolation",
    "DimensionError",
    "InfeasibleError",
    "ProblemFileError",
    "ProjectionError",
]
