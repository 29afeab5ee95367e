"""Exact solvers for bilevel optimization over tropical (max-plus) polytopes.

The upper level picks x in one tropical polytope, the lower level answers
with a y from another that minimizes or maximizes the tropical inner product
x^T y, and the upper objective a^T x oplus b^T y is optimized in either
direction.  All four direction combinations are covered by exact
rational-arithmetic solvers, cross-checkable against a brute-force oracle.
"""

from .bilevel import (
    ALGORITHMS,
    VARIANTS,
    BilevelInstance,
    BilevelSolution,
    PartitionPiece,
    check_lower_optimality,
    objective_value,
    partition_piece,
    solve,
    solve_enumerate,
    solve_iterative,
    solve_maxmax,
    solve_minmax,
    x_star,
)
from .errors import (
    BudgetExceededError,
    SolverInconsistencyError,
    UnsupportedInstanceError,
)
from .instances import (
    dumps_instance,
    instance_from_dict,
    instance_to_dict,
    load_instance,
    loads_instance,
    save_instance,
)
from .oracle import GridSpec, brute_bilevel, brute_phi, sample_polytope
from .polytope import (
    TropHalfspace,
    TropPolytopeV,
    contains,
    extreme_generators,
    greatest_point,
    minimal_points,
    phi_and_argmin,
    project_below,
    residuate,
)
from .semiring import (
    BOTTOM,
    TropScalar,
    TropVector,
    dominates,
    format_scalar,
    format_vector,
    tcomb,
    tdot,
    trop,
    tvec,
    vector_max,
)

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "BOTTOM",
    "BilevelInstance",
    "BilevelSolution",
    "BudgetExceededError",
    "GridSpec",
    "PartitionPiece",
    "SolverInconsistencyError",
    "TropHalfspace",
    "TropPolytopeV",
    "TropScalar",
    "TropVector",
    "UnsupportedInstanceError",
    "VARIANTS",
    "brute_bilevel",
    "brute_phi",
    "check_lower_optimality",
    "contains",
    "dominates",
    "dumps_instance",
    "extreme_generators",
    "format_scalar",
    "format_vector",
    "greatest_point",
    "instance_from_dict",
    "instance_to_dict",
    "load_instance",
    "loads_instance",
    "minimal_points",
    "objective_value",
    "partition_piece",
    "phi_and_argmin",
    "project_below",
    "residuate",
    "sample_polytope",
    "save_instance",
    "solve",
    "solve_enumerate",
    "solve_iterative",
    "solve_maxmax",
    "solve_minmax",
    "tcomb",
    "tdot",
    "trop",
    "tvec",
    "vector_max",
    "x_star",
]
