"""Surrogate relaxations and the quasi-subgradient dual search.

A surrogate relaxation replaces the m constraint rows by their single
mu-weighted aggregate; every originally feasible solution remains
feasible, so exact optima of the relaxed scalarization are valid
upper-shell elements.  The dual search walks mu uphill on the relaxation
value s(mu) with diminishing steps, keeping the best multiplier seen.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .instances import MomipInstance, _frozen
from .scalarize import ChebyshevParams
from .solver import FEAS_EPS, SolveTask, solve_chebyshev

STOP_STALL = "stall"
STOP_TIME = "time"
STOP_EXACT = "exact"

#: absolute improvement below which an iteration counts as stalled
IMPROVEMENT_TOL = 1e-9


@dataclass(frozen=True)
class Multipliers:
    """Nonnegative, not-all-zero weights over the constraint rows."""

    mu: tuple[float, ...]

    def __post_init__(self):
        if any(x < 0 for x in self.mu):
            raise ParameterError(f"multipliers must be nonnegative, got {self.mu}")
        if not any(x > 0 for x in self.mu):
            raise ParameterError("multipliers must not be all zero")


@dataclass(frozen=True, eq=False)
class SurrogateInstance:
    """Single-constraint relaxation of a base instance under multipliers mu."""

    base: MomipInstance
    mu: Multipliers
    row: np.ndarray
    rhs_total: float

    def __post_init__(self):
        object.__setattr__(self, "row", _frozen(self.row))

    @property
    def name(self) -> str:
        return f"{self.base.name}|surrogate"

    @property
    def objectives(self) -> np.ndarray:
        return self.base.objectives

    @property
    def constraints(self) -> np.ndarray:
        return self.row.reshape(1, -1)

    @property
    def rhs(self) -> np.ndarray:
        return np.array([self.rhs_total])

    @property
    def k(self) -> int:
        return self.base.k

    @property
    def n(self) -> int:
        return self.base.n


def make_surrogate(inst: MomipInstance, mu: Multipliers) -> SurrogateInstance:
    """Aggregate the constraint rows; the result's feasible set contains the original's."""
    vec = np.array(mu.mu, dtype=np.float64)
    if vec.shape != (inst.m,):
        raise ParameterError(f"multipliers have length {len(mu.mu)}, instance has m={inst.m}")
    return SurrogateInstance(
        base=inst,
        mu=mu,
        row=vec @ inst.constraints,
        rhs_total=float(vec @ inst.rhs),
    )


@dataclass(frozen=True)
class DualIteration:
    t: int
    mu: tuple[float, ...]
    s_mu: float
    alpha: float
    improved: bool


@dataclass(frozen=True)
class DualTrace:
    """Record of one dual search: per-iteration values and the best multiplier."""

    iterations: tuple[DualIteration, ...]
    best_mu: Multipliers
    best_value: float
    stop_reason: str

    def to_jsonl(self) -> str:
        return "\n".join(
            json.dumps({"t": it.t, "mu": list(it.mu), "s_mu": it.s_mu,
                        "alpha": it.alpha, "improved": it.improved})
            for it in self.iterations
        ) + "\n"


def uniform_multipliers(m: int) -> Multipliers:
    """The Chute1 choice: every row weighted 1."""
    return Multipliers((1.0,) * m)


def initial_multipliers(m: int) -> Multipliers:
    """Dual-search start: the all-ones vector scaled to unit Euclidean norm."""
    return Multipliers((1.0 / math.sqrt(m),) * m)


def suboptimal_multipliers(inst: MomipInstance, params: ChebyshevParams,
                           stall_limit: int, time_limit: float,
                           solve=solve_chebyshev) -> DualTrace:
    """Search the surrogate dual with diminishing quasi-subgradient steps.

    Step t uses alpha_t = alpha0 / (1 + t) with alpha0 = 1, projects onto
    the nonnegative orthant and renormalizes to unit Euclidean norm.
    Stops after `stall_limit` consecutive non-improving iterations, when
    `time_limit` seconds elapse, or when the relaxation optimum is
    feasible for the original problem (dual exactness).
    """
    if stall_limit < 1:
        raise ParameterError(f"stall limit must be >= 1, got {stall_limit}")
    if not time_limit > 0:
        raise ParameterError(f"time limit must be positive, got {time_limit}")
    t0 = time.monotonic()
    a = inst.constraints
    b = inst.rhs
    mu = np.array(initial_multipliers(inst.m).mu)
    alpha0 = 1.0
    alpha_scale = 1.0

    iterations: list[DualIteration] = []
    best_value = -math.inf
    best_mu = mu.copy()
    no_improve = 0
    stop_reason = STOP_STALL
    t = 0
    while True:
        surr = make_surrogate(inst, Multipliers(tuple(mu)))
        report = solve(SolveTask(surr, params, deadline=math.inf))
        x = np.array(report.incumbent.bits, dtype=np.float64)
        s_mu = report.objective
        d = a @ x - b
        alpha = alpha_scale * alpha0 / (1 + t)
        improved = s_mu > best_value + IMPROVEMENT_TOL
        iterations.append(DualIteration(t, tuple(float(v) for v in mu),
                                        float(s_mu), float(alpha), improved))
        if improved:
            best_value = s_mu
            best_mu = mu.copy()
            no_improve = 0
        else:
            no_improve += 1

        if np.all(d <= FEAS_EPS):
            stop_reason = STOP_EXACT
            break
        if no_improve >= stall_limit:
            stop_reason = STOP_STALL
            break
        if time.monotonic() - t0 > time_limit:
            stop_reason = STOP_TIME
            break

        nxt = np.maximum(0.0, mu + alpha * d)
        norm = float(np.linalg.norm(nxt))
        if norm <= 0.0:
            # degenerate projection: keep mu, damp future steps
            alpha_scale *= 0.5
        else:
            mu = nxt / norm
        t += 1

    return DualTrace(tuple(iterations), Multipliers(tuple(float(v) for v in best_mu)),
                     float(best_value), stop_reason)
