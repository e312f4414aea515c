"""Deadline-aware branch and bound for the Chebyshev scalarization.

Depth-first search over the 0-1 variables with a solver-free node bound:
each objective is bounded from above by a fractional knapsack on the
aggregated constraint (sum of all rows, or the single row of a surrogate
instance), and the bounds are combined ideal-point style.  The search is
fully deterministic for a fixed policy, reports the incumbent and a valid
global bound at any moment, and stops on a wall-clock deadline.

A vectorized exhaustive oracle (`brute_force_chebyshev`) provides the
independent ground truth for small instances.

The deadline is polled every 1024 nodes, so expiry can overshoot by the
time those expansions take (well under 50 ms at desk scale).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .instances import MomipInstance, Outcome, Solution
from .scalarize import ChebyshevParams, chebyshev_value

#: incumbent-vs-bound slack used when pruning, guards against float rounding
PRUNE_GUARD = 1e-12

#: feasibility slack on constraint rows
FEAS_EPS = 1e-9

#: the deadline is polled once per this many nodes
DEADLINE_CHECK_INTERVAL = 1024

CHEBYSHEV_POLICY = "dfs/bang-for-buck/one-first/lex-smallest"
MAXIMIZE_POLICY = "dfs/ratio-desc/one-first"
ORACLE_POLICY = "enumerate/lex-smallest"

OPTIMAL = "optimal"
TIME_LIMIT = "time_limit"
INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class SolveReport:
    """Outcome of one solve: status, incumbent, value, proven bound, effort."""

    status: str
    incumbent: Solution | None
    objective: float | None
    best_bound: float
    elapsed: float
    nodes: int
    policy: str


@dataclass(frozen=True)
class SolveTask:
    """One minimization of the Chebyshev scalarization under a deadline."""

    instance: object  # MomipInstance or SurrogateInstance
    params: ChebyshevParams
    deadline: float
    policy: str = CHEBYSHEV_POLICY

    def __post_init__(self):
        if not self.deadline > 0:
            raise ParameterError(f"deadline must be positive, got {self.deadline}")


def _rows(instance) -> tuple[list[list[float]], list[list[float]], list[float]]:
    """Plain-list views of (objectives, constraints, rhs) for the hot loop."""
    c = [list(map(float, row)) for row in np.atleast_2d(instance.objectives)]
    a = [list(map(float, row)) for row in np.atleast_2d(instance.constraints)]
    b = [float(x) for x in np.atleast_1d(instance.rhs)]
    return c, a, b


def _ratio_order(profit: list[float], weight: list[float]) -> list[int]:
    """Indices by profit/weight descending; zero weight sorts first, ties by index."""
    def ratio(j: int) -> float:
        if weight[j] > 0:
            return profit[j] / weight[j]
        return math.inf if profit[j] > 0 else 0.0
    return sorted(range(len(profit)), key=lambda j: (-ratio(j), j))


def solve_chebyshev(task: SolveTask) -> SolveReport:
    """Minimize the augmented Chebyshev value over the instance's feasible set.

    The zero vector seeds the incumbent.  On deadline expiry the report
    carries status ``time_limit``, the current incumbent, and the minimum
    bound over open nodes; exhausting the tree proves optimality.
    """
    t0 = time.monotonic()
    deadline_ts = t0 + task.deadline
    c, a, b = _rows(task.instance)
    k, n, m = len(c), len(c[0]), len(a)
    params = task.params
    lam = list(params.lam.weights)
    ys = list(params.y_star.values)
    rho = params.rho

    if any(bp < -FEAS_EPS for bp in b):
        return SolveReport(INFEASIBLE, None, None, math.inf,
                           time.monotonic() - t0, 0, task.policy)

    w = [sum(a[p][j] for p in range(m)) for j in range(n)]
    cap_total = sum(b)
    order = _ratio_order([sum(c[l][j] for l in range(k)) for j in range(n)], w)
    pos_of = [0] * n
    for pos, j in enumerate(order):
        pos_of[j] = pos
    obj_orders = [_ratio_order(c[l], w) for l in range(k)]

    def value_of(outc: tuple[float, ...]) -> float:
        diffs = [ys[l] - outc[l] for l in range(k)]
        return max(lam[l] * diffs[l] for l in range(k)) + rho * sum(diffs)

    def node_bound(pos: int, outc: tuple[float, ...], agg_load: float) -> float:
        top = -math.inf
        total = 0.0
        for l in range(k):
            ub = outc[l]
            rem = cap_total - agg_load
            cl = c[l]
            for j in obj_orders[l]:
                if pos_of[j] < pos:
                    continue
                wj = w[j]
                if wj <= rem:
                    ub += cl[j]
                    rem -= wj
                else:
                    if rem > 0:
                        ub += cl[j] * (rem / wj)
                    break
            d = ys[l] - ub
            t = lam[l] * d
            if t > top:
                top = t
            total += d
        return top + rho * total

    zero_outc = (0.0,) * k
    best_bits: tuple[int, ...] = (0,) * n
    best_key = 0
    best_val = value_of(zero_outc)

    root_bound = node_bound(0, zero_outc, 0.0)
    # node entries: (pos, key, ones, loads, outc, inherited bound)
    stack = [(0, 0, (), (0.0,) * m, zero_outc, root_bound)]
    nodes = 0
    status = OPTIMAL

    while stack:
        if nodes % DEADLINE_CHECK_INTERVAL == 0 and time.monotonic() > deadline_ts:
            status = TIME_LIMIT
            break
        nodes += 1
        pos, key, ones, loads, outc, ibound = stack.pop()
        if ibound >= best_val - PRUNE_GUARD:
            continue
        bound = node_bound(pos, outc, sum(loads))
        if bound >= best_val - PRUNE_GUARD or pos == n:
            continue
        j = order[pos]
        stack.append((pos + 1, key, ones, loads, outc, bound))
        if all(loads[p] + a[p][j] <= b[p] + FEAS_EPS for p in range(m)):
            nloads = tuple(loads[p] + a[p][j] for p in range(m))
            noutc = tuple(outc[l] + c[l][j] for l in range(k))
            nkey = key + (1 << j)
            val = value_of(noutc)
            if val < best_val:
                best_val, best_key = val, nkey
                best_bits = _bits_from_key(nkey, n)
            elif val == best_val and nkey < best_key:
                best_key = nkey
                best_bits = _bits_from_key(nkey, n)
            stack.append((pos + 1, nkey, ones + (j,), nloads, noutc, bound))

    if status == OPTIMAL:
        bound_out = best_val
    else:
        bound_out = min([e[5] for e in stack] + [best_val])
    return SolveReport(status, Solution(best_bits), best_val, bound_out,
                       time.monotonic() - t0, nodes, task.policy)


def _bits_from_key(key: int, n: int) -> tuple[int, ...]:
    return tuple((key >> j) & 1 for j in range(n))


def maximize_objective(inst: MomipInstance, l: int, deadline: float) -> SolveReport:
    """Maximize a single objective row; best_bound sits above the true maximum."""
    if not deadline > 0:
        raise ParameterError(f"deadline must be positive, got {deadline}")
    if not 0 <= l < inst.k:
        raise ParameterError(f"objective index {l} outside 0..{inst.k - 1}")
    t0 = time.monotonic()
    deadline_ts = t0 + deadline
    c_all, a, b = _rows(inst)
    c = c_all[l]
    n, m = len(c), len(a)

    if any(bp < -FEAS_EPS for bp in b):
        return SolveReport(INFEASIBLE, None, None, -math.inf,
                           time.monotonic() - t0, 0, MAXIMIZE_POLICY)

    w = [sum(a[p][j] for p in range(m)) for j in range(n)]
    cap_total = sum(b)
    order = _ratio_order(c, w)
    pos_of = [0] * n
    for pos, j in enumerate(order):
        pos_of[j] = pos

    def node_ub(pos: int, profit: float, agg_load: float) -> float:
        ub = profit
        rem = cap_total - agg_load
        for j in order:
            if pos_of[j] < pos:
                continue
            wj = w[j]
            if wj <= rem:
                ub += c[j]
                rem -= wj
            else:
                if rem > 0:
                    ub += c[j] * (rem / wj)
                break
        return ub

    best_bits: tuple[int, ...] = (0,) * n
    best_key = 0
    best_val = 0.0
    root_ub = node_ub(0, 0.0, 0.0)
    stack = [(0, 0, (0.0,) * m, 0.0, root_ub)]
    nodes = 0
    status = OPTIMAL
    while stack:
        if nodes % DEADLINE_CHECK_INTERVAL == 0 and time.monotonic() > deadline_ts:
            status = TIME_LIMIT
            break
        nodes += 1
        pos, key, loads, profit, iub = stack.pop()
        if iub <= best_val + PRUNE_GUARD:
            continue
        ub = node_ub(pos, profit, sum(loads))
        if ub <= best_val + PRUNE_GUARD or pos == n:
            continue
        j = order[pos]
        stack.append((pos + 1, key, loads, profit, ub))
        if all(loads[p] + a[p][j] <= b[p] + FEAS_EPS for p in range(m)):
            nloads = tuple(loads[p] + a[p][j] for p in range(m))
            nprofit = profit + c[j]
            nkey = key + (1 << j)
            if nprofit > best_val:
                best_val, best_key = nprofit, nkey
                best_bits = _bits_from_key(nkey, n)
            elif nprofit == best_val and nkey < best_key:
                best_key = nkey
                best_bits = _bits_from_key(nkey, n)
            stack.append((pos + 1, nkey, nloads, nprofit, ub))

    if status == OPTIMAL:
        bound_out = best_val
    else:
        bound_out = max([e[4] for e in stack] + [best_val])
    return SolveReport(status, Solution(best_bits), best_val, bound_out,
                       time.monotonic() - t0, nodes, MAXIMIZE_POLICY)


#: enumeration guard for the oracle
ORACLE_MAX_N = 25

_CHUNK = 1 << 18


def brute_force_chebyshev(instance, params: ChebyshevParams) -> SolveReport:
    """Exhaustive oracle: exact minimizer over all 2^n vectors, n <= 25.

    Ties resolve to the smallest little-endian key, i.e. the first hit in
    ascending enumeration order.
    """
    c = np.atleast_2d(instance.objectives)
    a = np.atleast_2d(instance.constraints)
    b = np.atleast_1d(instance.rhs)
    k, n = c.shape
    if n > ORACLE_MAX_N:
        raise ParameterError(f"oracle enumeration limited to n <= {ORACLE_MAX_N}, got {n}")
    t0 = time.monotonic()
    lam = np.array(params.lam.weights)
    ys = np.array(params.y_star.values)
    rho = params.rho
    cols = np.arange(n)
    best_val = math.inf
    best_idx = -1
    total = 1 << n
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        bits = ((idx[:, None] >> cols) & 1).astype(np.float64)
        feas = np.all(bits @ a.T <= b + FEAS_EPS, axis=1)
        if not feas.any():
            continue
        f = bits[feas] @ c.T
        d = ys - f
        vals = np.max(lam * d, axis=1) + rho * np.sum(d, axis=1)
        i = int(np.argmin(vals))
        v = float(vals[i])
        if v < best_val:
            best_val = v
            best_idx = int(idx[feas][i])
    elapsed = time.monotonic() - t0
    if best_idx < 0:
        return SolveReport(INFEASIBLE, None, None, math.inf, elapsed, total, ORACLE_POLICY)
    sol = Solution(_bits_from_key(best_idx, n))
    return SolveReport(OPTIMAL, sol, best_val, best_val, elapsed, total, ORACLE_POLICY)


def brute_force_outcomes(inst: MomipInstance):
    """All feasible solutions of a small instance with their outcomes (test helper)."""
    if inst.n > ORACLE_MAX_N:
        raise ParameterError(f"enumeration limited to n <= {ORACLE_MAX_N}, got {inst.n}")
    a = inst.constraints
    c = inst.objectives
    total = 1 << inst.n
    cols = np.arange(inst.n)
    out = []
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        bits = ((idx[:, None] >> cols) & 1).astype(np.float64)
        feas = np.all(bits @ a.T <= inst.rhs + FEAS_EPS, axis=1)
        fb = bits[feas]
        f = fb @ c.T
        for row, vals in zip(fb, f):
            out.append((Solution(tuple(int(x) for x in row)),
                        Outcome(tuple(float(v) for v in vals))))
    return out


def _sig(x: float) -> str:
    return f"{x:.12g}"


def export_chebyshev_lp(instance, params: ChebyshevParams) -> str:
    """LP-format text of the linearized scalarization, for external cross-checks.

    min s  s.t.  s >= lambda_l (y*_l - f_l(x)) + rho e(y* - f(x)) for each l,
    plus the original constraint rows and binary bounds.
    """
    c = np.atleast_2d(instance.objectives)
    a = np.atleast_2d(instance.constraints)
    b = np.atleast_1d(instance.rhs)
    k, n = c.shape
    if params.k != k:
        raise ParameterError(f"params have k={params.k} but instance has k={k}")
    lam = params.lam.weights
    ys = params.y_star.values
    rho = params.rho
    csum = c.sum(axis=0)
    ytot = sum(ys)
    lines = [f"\\ Chebyshev scalarization of {getattr(instance, 'name', 'instance')}",
             "Minimize", " obj: s", "Subject To"]
    for l in range(k):
        terms = " ".join(f"+ {_sig(lam[l] * c[l][j] + rho * csum[j])} x{j + 1}"
                         for j in range(n))
        lines.append(f" cheb_{l + 1}: s {terms} >= {_sig(lam[l] * ys[l] + rho * ytot)}")
    for p in range(a.shape[0]):
        terms = " ".join(f"+ {_sig(a[p][j])} x{j + 1}" for j in range(n))
        lines.append(f" cap_{p + 1}: {terms} <= {_sig(b[p])}")
    lines.append("Bounds")
    lines.append(" s free")
    lines.append("Binaries")
    lines.append(" " + " ".join(f"x{j + 1}" for j in range(n)))
    lines.append("End")
    return "\n".join(lines) + "\n"


def chebyshev_value_of(instance, x: Solution, params: ChebyshevParams) -> float:
    """Convenience: scalarization value of a solution on an instance."""
    c = np.atleast_2d(instance.objectives)
    bits = np.array(x.bits, dtype=np.float64)
    return chebyshev_value(Outcome(tuple(float(v) for v in c @ bits)), params)
