"""Probing engine: builds interval representations under time budgets.

For each target objective the engine perturbs the weight vector along a
fixed schedule, solves the surrogate-relaxed scalarization exactly at
every probe, and stops as soon as one relaxation optimum is located
against the lower-bound vector well enough to cap the target component.
Variant chute1 aggregates constraints with unit multipliers; chute2 first
runs the dual search and reuses its best multiplier for all probes.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

from .errors import ParameterError, ScopeError, SolverError
from .instances import MomipInstance, Outcome, Solution, WeightVector, evaluate_outcome
from .scalarize import DEFAULT_RHO, ChebyshevParams, ReferencePoint
from .shells import (
    INCUMBENT,
    LOWER,
    RELAXATION_OPTIMAL,
    SOURCE_DEFAULT_YSTAR,
    UPPER,
    BoundVector,
    IntervalRepresentation,
    Provenance,
    Shell,
    ShellMember,
    interval_representation,
    interval_to_dict,
    lower_bounds,
    eligible_for_upper,
    shell_to_dict,
)
from .solver import SolveReport, SolveTask, solve_chebyshev
from .surrogate import (
    DualTrace,
    Multipliers,
    make_surrogate,
    suboptimal_multipliers,
    uniform_multipliers,
)

CHUTE1 = "chute1"
CHUTE2 = "chute2"


@dataclass(frozen=True)
class ProbeSchedule:
    """The probing vectors for one target objective, fixed before any solve."""

    l_bar: int
    base: WeightVector
    delta: float
    gamma: float
    probes: tuple[WeightVector, ...]


def build_probe_schedule(l_bar: int, lam: WeightVector, gamma: float) -> ProbeSchedule:
    """Step the target weight up by delta = (1 - lambda_l)/gamma per probe.

    Non-target components each lose delta/(k-1), so every probe stays on
    the simplex; the schedule ends when the target would reach 1, when a
    non-target component would leave the open simplex, or after ceil(gamma)
    probes.
    """
    if not gamma > 0:
        raise ParameterError(f"gamma must be positive, got {gamma}")
    k = lam.k
    if not 0 <= l_bar < k:
        raise ParameterError(f"objective index {l_bar} outside 0..{k - 1}")
    delta = (1.0 - lam.weights[l_bar]) / gamma
    step = delta / (k - 1)
    cap = math.ceil(gamma)
    probes: list[WeightVector] = []
    cur = list(lam.weights)
    cur[l_bar] += delta
    while cur[l_bar] < 1.0 and len(probes) < cap:
        nxt = list(cur)
        ok = True
        for l in range(k):
            if l == l_bar:
                continue
            if nxt[l] - step <= 0.0:
                ok = False
                break
            nxt[l] -= step
        if not ok:
            break
        probes.append(WeightVector(tuple(nxt)))
        cur = nxt
        cur[l_bar] += delta
    return ProbeSchedule(l_bar, lam, delta, float(gamma), tuple(probes))


@dataclass(frozen=True)
class ChuteConfig:
    """Engine knobs: variant, budgets and probing density."""

    variant: str = CHUTE1
    tl: float = 5.0  # incumbent deadline, seconds
    gamma: float = 10.0
    rho: float = DEFAULT_RHO
    n_stall: int = 20
    ts: float = 2.0  # dual-search deadline, seconds (chute2)
    shell_deadline: float | None = None
    floor: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.variant not in (CHUTE1, CHUTE2):
            raise ParameterError(f"variant must be chute1 or chute2, got {self.variant!r}")
        if not self.tl > 0 or not self.ts > 0:
            raise ParameterError("time budgets must be positive")
        if not self.gamma > 0:
            raise ParameterError(f"gamma must be positive, got {self.gamma}")
        if not self.rho > 0:
            raise ParameterError(f"rho must be positive, got {self.rho}")
        if self.n_stall < 1:
            raise ParameterError(f"stall limit must be >= 1, got {self.n_stall}")
        if self.shell_deadline is not None and not self.shell_deadline > 0:
            raise ParameterError("shell deadline must be positive when set")


@dataclass(frozen=True)
class UpperShellSearch:
    """Result of probing one target objective."""

    shell: Shell
    upper: float
    source: str  # member id or default-y*
    probes: tuple[WeightVector, ...]
    hit: bool
    elapsed: float


def find_upper_shell(l_bar: int, lam: WeightVector, y_star: ReferencePoint,
                     lower: BoundVector, gamma: float, mu: Multipliers,
                     inst: MomipInstance, solve=solve_chebyshev,
                     rho: float = DEFAULT_RHO,
                     shell_deadline: float | None = None) -> UpperShellSearch:
    """Probe until a relaxation optimum caps objective l_bar, or run out.

    Every returned member is an exact optimum of the mu-surrogate
    scalarization for its probing vector, hence a valid upper-shell
    element; with no eligible member the bound falls back to y*_l_bar.
    """
    t0 = time.monotonic()
    schedule = build_probe_schedule(l_bar, lam, gamma)
    surr = make_surrogate(inst, mu)
    members: list[ShellMember] = []
    seen: set[tuple[int, ...]] = set()
    upper = float(y_star.values[l_bar])
    source = SOURCE_DEFAULT_YSTAR
    hit = False
    probed: list[WeightVector] = []
    for probe in schedule.probes:
        if shell_deadline is not None and time.monotonic() - t0 > shell_deadline:
            break
        params = ChebyshevParams(probe, y_star, rho)
        try:
            report = solve(SolveTask(surr, params, deadline=math.inf))
        except Exception as e:
            raise SolverError(f"probe solve failed for l={l_bar}, lambda'={probe.weights}: {e}") from e
        if report.status != "optimal" or report.incumbent is None:
            raise SolverError(f"probe solve did not reach optimality for l={l_bar}")
        probed.append(probe)
        x = report.incumbent
        outcome = evaluate_outcome(inst, x)
        member = ShellMember(x, outcome, Provenance(RELAXATION_OPTIMAL, mu.mu, probe.weights))
        if x.bits not in seen:
            seen.add(x.bits)
            members.append(member)
        if eligible_for_upper(outcome, l_bar, lower):
            # y* stays in the min: a relaxation optimum can top it
            if outcome.values[l_bar] < upper:
                upper = float(outcome.values[l_bar])
                source = member.member_id
            hit = True
            break
    return UpperShellSearch(Shell(UPPER, tuple(members)), upper, source,
                            tuple(probed), hit, time.monotonic() - t0)


@dataclass(frozen=True)
class Timings:
    incumbent_s: float
    dual_s: float | None
    shells_s: tuple[float, ...]


@dataclass(frozen=True)
class ChuteResult:
    """Everything one engine run produces for a single weight vector."""

    instance_name: str
    lam: WeightVector
    variant: str
    gamma: float
    rho: float
    y_star: ReferencePoint
    s_l: Shell
    s_u: Shell
    lower: BoundVector
    upper: BoundVector
    representation: IntervalRepresentation
    timings: Timings
    searches: tuple[UpperShellSearch, ...]
    incumbent_report: SolveReport
    dual_trace: DualTrace | None

    def to_dict(self) -> dict:
        doc = {
            "instance": self.instance_name,
            "lambda": list(self.lam.weights),
            "variant": self.variant,
            "gamma": self.gamma,
            "rho": self.rho,
            "y_star": {"values": list(self.y_star.values),
                       "provenance": list(self.y_star.provenance)},
            "L": list(self.lower.values),
            "U": list(self.upper.values),
            "gap": list(self.representation.gap),
            "shell_sizes": {"s_l": len(self.s_l), "s_u": len(self.s_u)},
            "timings": {"incumbent_s": self.timings.incumbent_s,
                        "dual_s": self.timings.dual_s,
                        "shells_s": list(self.timings.shells_s)},
            "probes": [{"l_bar": i, "lambda": list(p.weights)}
                       for i, search in enumerate(self.searches)
                       for p in search.probes],
            "incumbent": {"status": self.incumbent_report.status,
                          "objective": self.incumbent_report.objective,
                          "best_bound": self.incumbent_report.best_bound,
                          "nodes": self.incumbent_report.nodes},
            "s_l_shell": shell_to_dict(self.s_l),
            "s_u_shell": shell_to_dict(self.s_u),
            "representation": interval_to_dict(self.representation),
        }
        if self.dual_trace is not None:
            doc["dual"] = {"stop_reason": self.dual_trace.stop_reason,
                           "best_value": self.dual_trace.best_value,
                           "best_mu": list(self.dual_trace.best_mu.mu),
                           "iterations": len(self.dual_trace.iterations)}
        return doc


def chute(inst: MomipInstance, lam: WeightVector, y_star: ReferencePoint,
          config: ChuteConfig, solve=solve_chebyshev) -> ChuteResult:
    """Run one interval-representation derivation for a weight vector.

    Solves the scalarization under the incumbent budget, inverts the
    incumbent into lower bounds, picks multipliers per variant, probes an
    upper shell per objective, and assembles the interval representation.
    """
    if inst.k not in (2, 3):
        raise ScopeError(f"engine supports k in {{2, 3}}, instance has k={inst.k}")
    if lam.k != inst.k or y_star.k != inst.k:
        raise ParameterError("lambda, y* and instance disagree on k")
    params = ChebyshevParams(lam, y_star, config.rho)

    t0 = time.monotonic()
    try:
        inc_report = solve(SolveTask(inst, params, deadline=config.tl))
    except Exception as e:
        raise SolverError(f"incumbent stage failed: {e}") from e
    if inc_report.status == "infeasible" or inc_report.incumbent is None:
        raise SolverError("incumbent stage found the instance infeasible")
    incumbent_s = time.monotonic() - t0

    inc = inc_report.incumbent
    s_l = Shell(LOWER, (ShellMember(inc, evaluate_outcome(inst, inc),
                                    Provenance(INCUMBENT)),))
    lower = lower_bounds(s_l, params, config.floor)

    dual_trace = None
    dual_s = None
    if config.variant == CHUTE1:
        mu = uniform_multipliers(inst.m)
    else:
        t1 = time.monotonic()
        try:
            dual_trace = suboptimal_multipliers(inst, params, config.n_stall,
                                                config.ts, solve=solve)
        except Exception as e:
            raise SolverError(f"dual-search stage failed: {e}") from e
        mu = dual_trace.best_mu
        dual_s = time.monotonic() - t1

    searches: list[UpperShellSearch] = []
    members: list[ShellMember] = []
    seen: set[tuple[int, ...]] = set()
    upper_values: list[float] = []
    upper_sources: list[str] = []
    for l_bar in range(inst.k):
        search = find_upper_shell(l_bar, lam, y_star, lower, config.gamma, mu,
                                  inst, solve=solve, rho=config.rho,
                                  shell_deadline=config.shell_deadline)
        searches.append(search)
        upper_values.append(search.upper)
        upper_sources.append(search.source)
        for m in search.shell.members:
            if m.solution.bits not in seen:
                seen.add(m.solution.bits)
                members.append(m)
    s_u = Shell(UPPER, tuple(members))
    upper = BoundVector(UPPER, tuple(upper_values), tuple(upper_sources))
    rep = interval_representation(lower, upper, lam)
    timings = Timings(incumbent_s, dual_s, tuple(s.elapsed for s in searches))
    return ChuteResult(inst.name, lam, config.variant, config.gamma, config.rho,
                       y_star, s_l, s_u, lower, upper, rep, timings,
                       tuple(searches), inc_report, dual_trace)
