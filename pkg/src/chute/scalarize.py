"""Augmented Chebyshev scalarization and reference point estimation.

The scalarized objective for a weight vector lambda, reference point y*
and augmentation coefficient rho is

    max_l lambda_l (y*_l - f_l(x))  +  rho * sum_l (y*_l - f_l(x)),

minimized over the feasible set.  The rho-term is constant across l, so
the value equals the row form min{s : s >= lambda_l (y*_l - f_l) + rho *
sum(y* - f) for all l} used by the linearized export.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DimensionError, ParameterError
from .instances import MomipInstance, Outcome, WeightVector

EXACT_PLUS_EPSILON = "exact-plus-epsilon"
BEST_BOUND = "best-bound"

DEFAULT_RHO = 0.001
DEFAULT_EPSILON = 1.0


@dataclass(frozen=True)
class ReferencePoint:
    """Per-objective values strictly above every feasible outcome, with provenance."""

    values: tuple[float, ...]
    provenance: tuple[str, ...]

    def __post_init__(self):
        if len(self.values) != len(self.provenance):
            raise DimensionError("reference point values and provenance differ in length")
        bad = [p for p in self.provenance if p not in (EXACT_PLUS_EPSILON, BEST_BOUND)]
        if bad:
            raise ParameterError(f"unknown provenance tag(s) {bad}")

    @property
    def k(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class ChebyshevParams:
    """Bundle (lambda, y*, rho) for one scalarization."""

    lam: WeightVector
    y_star: ReferencePoint
    rho: float = DEFAULT_RHO
    allow_zero_rho: bool = False  # oracle cross-checks only

    def __post_init__(self):
        if self.lam.k != self.y_star.k:
            raise DimensionError(f"lambda has k={self.lam.k} but y* has k={self.y_star.k}")
        if self.rho < 0 or (self.rho == 0 and not self.allow_zero_rho):
            raise ParameterError(f"rho must be positive, got {self.rho}")

    @property
    def k(self) -> int:
        return self.lam.k


def chebyshev_value(outcome: Outcome, params: ChebyshevParams) -> float:
    """Scalarization value of one outcome: max term plus the rho-weighted sum."""
    if len(outcome.values) != params.k:
        raise DimensionError(f"outcome has length {len(outcome.values)}, expected {params.k}")
    lam = params.lam.weights
    ys = params.y_star.values
    diffs = [y - f for y, f in zip(ys, outcome.values)]
    return max(l * d for l, d in zip(lam, diffs)) + params.rho * sum(diffs)


def chebyshev_row_values(outcome: Outcome, params: ChebyshevParams) -> tuple[float, ...]:
    """Per-row values lambda_l (y*_l - f_l) + rho * sum(y* - f) of the linearized form."""
    if len(outcome.values) != params.k:
        raise DimensionError(f"outcome has length {len(outcome.values)}, expected {params.k}")
    lam = params.lam.weights
    ys = params.y_star.values
    diffs = [y - f for y, f in zip(ys, outcome.values)]
    aug = params.rho * sum(diffs)
    return tuple(l * d + aug for l, d in zip(lam, diffs))


def estimate_reference_point(inst: MomipInstance, per_objective_deadline: float,
                             epsilon: float = DEFAULT_EPSILON,
                             maximize=None) -> ReferencePoint:
    """Estimate y* by maximizing each objective under a per-objective deadline.

    Objectives solved to optimality contribute max + epsilon; timed-out
    solves contribute the solver's best bound, which also sits (weakly)
    above the unknown maximum.
    """
    if epsilon <= 0:
        raise ParameterError(f"epsilon must be positive, got {epsilon}")
    if per_objective_deadline <= 0:
        raise ParameterError(f"deadline must be positive, got {per_objective_deadline}")
    if maximize is None:
        from .solver import maximize_objective
        maximize = maximize_objective
    values: list[float] = []
    provenance: list[str] = []
    for l in range(inst.k):
        report = maximize(inst, l, per_objective_deadline)
        if report.status == "optimal":
            values.append(report.objective + epsilon)
            provenance.append(EXACT_PLUS_EPSILON)
        else:
            values.append(report.best_bound)
            provenance.append(BEST_BOUND)
    return ReferencePoint(tuple(values), tuple(provenance))
