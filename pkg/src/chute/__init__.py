"""Interval representations of Pareto optimal outcomes under time budgets."""

from .engine import CHUTE1, CHUTE2, ChuteConfig, ChuteResult, chute, find_upper_shell
from .errors import ChuteError
from .instances import (
    MomipInstance,
    Outcome,
    Solution,
    WeightVector,
    dominates,
    evaluate_outcome,
    generate_instance,
    is_feasible,
    parse_instance,
    sample_weight_vectors,
    serialize_instance,
)
from .scalarize import ChebyshevParams, ReferencePoint, chebyshev_value, estimate_reference_point
from .shells import (
    BoundVector,
    IntervalRepresentation,
    Shell,
    gap_vector,
    interval_representation,
    lower_bounds,
    merge_lower,
    merge_upper,
    upper_bounds,
)
from .solver import SolveReport, SolveTask, brute_force_chebyshev, maximize_objective, solve_chebyshev
from .surrogate import DualTrace, Multipliers, SurrogateInstance, make_surrogate, suboptimal_multipliers

__version__ = "0.1.0"

__all__ = [
    "CHUTE1",
    "CHUTE2",
    "BoundVector",
    "ChebyshevParams",
    "ChuteConfig",
    "ChuteError",
    "ChuteResult",
    "DualTrace",
    "IntervalRepresentation",
    "MomipInstance",
    "Multipliers",
    "Outcome",
    "ReferencePoint",
    "Shell",
    "Solution",
    "SolveReport",
    "SolveTask",
    "SurrogateInstance",
    "WeightVector",
    "brute_force_chebyshev",
    "chebyshev_value",
    "chute",
    "dominates",
    "estimate_reference_point",
    "evaluate_outcome",
    "find_upper_shell",
    "gap_vector",
    "generate_instance",
    "interval_representation",
    "is_feasible",
    "lower_bounds",
    "make_surrogate",
    "maximize_objective",
    "merge_lower",
    "merge_upper",
    "parse_instance",
    "sample_weight_vectors",
    "serialize_instance",
    "solve_chebyshev",
    "suboptimal_multipliers",
    "upper_bounds",
]
