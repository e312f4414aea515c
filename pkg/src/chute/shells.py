"""Lower/upper shells, bound vectors, interval representations and merges.

A lower shell holds feasible solutions; its best (smallest) Chebyshev
value s_inc inverts into per-objective lower bounds via

    L_l = max(floor_l, y*_l - s_inc / (lambda_l + rho)),

sound because the optimum's value is at most s_inc and every augmentation
term it drops is nonnegative.  An upper shell holds exact optima of
relaxed scalarizations; a member appropriately located against L (Lemma-1
style eligibility) caps one outcome component from above.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConsistencyError, DimensionError, DomainError, StateError
from .instances import Outcome, Solution, WeightVector, dominates
from .scalarize import ChebyshevParams, ReferencePoint, chebyshev_value

LOWER = "lower"
UPPER = "upper"

INCUMBENT = "incumbent"
RELAXATION_OPTIMAL = "relaxation-optimal"

#: slack for bound-crossing checks
BOUND_TOL = 1e-9

SOURCE_FLOOR = "floor"
SOURCE_DEFAULT_YSTAR = "default-y*"


@dataclass(frozen=True)
class Provenance:
    """How a shell member was produced."""

    kind: str  # incumbent | relaxation-optimal
    mu: tuple[float, ...] | None = None
    lambda_probe: tuple[float, ...] | None = None


@dataclass(frozen=True)
class ShellMember:
    solution: Solution
    outcome: Outcome
    provenance: Provenance

    @property
    def member_id(self) -> str:
        return f"member:{self.solution.key()}"


@dataclass(frozen=True)
class Shell:
    """A finite set of (solution, outcome) pairs tagged lower or upper."""

    kind: str
    members: tuple[ShellMember, ...]

    def __post_init__(self):
        if self.kind not in (LOWER, UPPER):
            raise DomainError(f"shell kind must be lower or upper, got {self.kind!r}")
        seen = set()
        for m in self.members:
            if m.solution.bits in seen:
                raise ConsistencyError("duplicate solution in shell")
            seen.add(m.solution.bits)

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class BoundVector:
    side: str  # lower | upper
    values: tuple[float, ...]
    sources: tuple[str, ...]

    def __post_init__(self):
        if self.side not in (LOWER, UPPER):
            raise DomainError(f"bound side must be lower or upper, got {self.side!r}")
        if len(self.values) != len(self.sources):
            raise DimensionError("bound values and sources differ in length")


@dataclass(frozen=True)
class IntervalRepresentation:
    """Per-objective [L_l, U_l] brackets plus the percentage gap vector."""

    lam: WeightVector
    intervals: tuple[tuple[float, float], ...]
    gap: tuple[float, ...]


def lower_bounds(shell: Shell, params: ChebyshevParams,
                 floor: tuple[float, ...] | None = None) -> BoundVector:
    """Invert the shell's best Chebyshev value into per-objective lower bounds."""
    if shell.kind != LOWER:
        raise TypeError(f"lower_bounds needs a lower shell, got {shell.kind!r}")
    if not shell.members:
        raise StateError("lower shell is empty")
    k = params.k
    if floor is None:
        floor = (0.0,) * k
    if len(floor) != k:
        raise DimensionError(f"floor has length {len(floor)}, expected {k}")
    best_member = min(shell.members,
                      key=lambda m: chebyshev_value(m.outcome, params))
    s_inc = chebyshev_value(best_member.outcome, params)
    lam = params.lam.weights
    ys = params.y_star.values
    values = []
    sources = []
    for l in range(k):
        raw = ys[l] - s_inc / (lam[l] + params.rho)
        if raw < floor[l]:
            values.append(float(floor[l]))
            sources.append(SOURCE_FLOOR)
        else:
            values.append(float(raw))
            sources.append(best_member.member_id)
    return BoundVector(LOWER, tuple(values), tuple(sources))


def eligible_for_upper(outcome: Outcome, l_bar: int, lower: BoundVector) -> bool:
    """Located against L so that its l_bar component caps the optimum's."""
    k = len(lower.values)
    if len(outcome.values) != k:
        raise DimensionError(f"outcome has length {len(outcome.values)}, expected {k}")
    if not 0 <= l_bar < k:
        raise DimensionError(f"objective index {l_bar} outside 0..{k - 1}")
    f = outcome.values
    L = lower.values
    if L[l_bar] > f[l_bar]:
        return False
    return all(L[l] >= f[l] for l in range(k) if l != l_bar)


def upper_bounds(shell: Shell, lower: BoundVector, y_star: ReferencePoint) -> BoundVector:
    """Componentwise min over eligible members and y*.

    y* always bounds feasible outcomes from above, so it stays in the min
    even when eligible members exist; relaxation optima can exceed y*
    components, and dropping the y* term would let a grown shell loosen U.
    """
    if shell.kind != UPPER:
        raise TypeError(f"upper_bounds needs an upper shell, got {shell.kind!r}")
    k = len(lower.values)
    if y_star.k != k:
        raise DimensionError(f"y* has k={y_star.k}, lower bounds have k={k}")
    values = []
    sources = []
    for l_bar in range(k):
        best_val = float(y_star.values[l_bar])
        best_src = SOURCE_DEFAULT_YSTAR
        for m in shell.members:
            if not eligible_for_upper(m.outcome, l_bar, lower):
                continue
            v = m.outcome.values[l_bar]
            if v < best_val:
                best_val = float(v)
                best_src = m.member_id
        values.append(best_val)
        sources.append(best_src)
    return BoundVector(UPPER, tuple(values), tuple(sources))


def gap_vector(lower, upper) -> tuple[float, ...]:
    """Percent gaps 100 (U_l - L_l) / U_l; requires U_l > 0."""
    lo = _values(lower)
    up = _values(upper)
    if len(lo) != len(up):
        raise DimensionError(f"bound vectors have lengths {len(lo)} and {len(up)}")
    if any(u <= 0 for u in up):
        raise DomainError(f"gap undefined for nonpositive upper bound in {up}")
    return tuple(100.0 * (u - l) / u for l, u in zip(lo, up))


def _values(v) -> tuple[float, ...]:
    if isinstance(v, BoundVector):
        return v.values
    return tuple(float(x) for x in v)


def interval_representation(lower: BoundVector, upper: BoundVector,
                            lam: WeightVector) -> IntervalRepresentation:
    """Pair the bounds into intervals; crossed bounds signal an upstream bug."""
    lo = lower.values
    up = upper.values
    if len(lo) != len(up) or len(lo) != lam.k:
        raise DimensionError("bound vectors and lambda differ in length")
    for l, (a, b) in enumerate(zip(lo, up)):
        if a > b + BOUND_TOL:
            raise ConsistencyError(
                f"lower bound {a} exceeds upper bound {b} for objective {l}")
    return IntervalRepresentation(lam, tuple(zip(lo, up)), gap_vector(lower, upper))


def _merge(shells, kind: str, drop_if) -> Shell:
    for s in shells:
        if not isinstance(s, Shell):
            raise TypeError(f"expected Shell, got {type(s).__name__}")
        if s.kind != kind:
            raise TypeError(f"cannot merge {s.kind!r} shell as {kind!r}")
    merged: list[ShellMember] = []
    seen = set()
    for s in shells:
        for m in s.members:
            if m.solution.bits not in seen:
                seen.add(m.solution.bits)
                merged.append(m)
    if merged:
        ks = {len(m.outcome.values) for m in merged}
        if len(ks) != 1:
            raise DimensionError("members from different objective spaces")
    keep = [m for m in merged
            if not any(drop_if(m.outcome, o.outcome) for o in merged if o is not m)]
    return Shell(kind, tuple(keep))


def merge_lower(shells) -> Shell:
    """Union of lower shells with dominated members removed."""
    return _merge(shells, LOWER, lambda mine, other: dominates(other, mine))


def merge_upper(shells) -> Shell:
    """Union of upper shells with dominating members removed."""
    return _merge(shells, UPPER, lambda mine, other: dominates(mine, other))


def shell_to_dict(shell: Shell) -> dict:
    return {
        "kind": shell.kind,
        "members": [
            {
                "bits": list(m.solution.bits),
                "outcome": list(m.outcome.values),
                "provenance": {
                    "kind": m.provenance.kind,
                    "mu": list(m.provenance.mu) if m.provenance.mu is not None else None,
                    "lambda": (list(m.provenance.lambda_probe)
                               if m.provenance.lambda_probe is not None else None),
                },
            }
            for m in shell.members
        ],
    }


def shell_from_dict(doc: dict) -> Shell:
    members = tuple(
        ShellMember(
            Solution(tuple(int(b) for b in m["bits"])),
            Outcome(tuple(float(v) for v in m["outcome"])),
            Provenance(
                m["provenance"]["kind"],
                tuple(m["provenance"]["mu"]) if m["provenance"]["mu"] is not None else None,
                tuple(m["provenance"]["lambda"]) if m["provenance"]["lambda"] is not None else None,
            ),
        )
        for m in doc["members"]
    )
    return Shell(doc["kind"], members)


def interval_to_dict(rep: IntervalRepresentation) -> dict:
    return {
        "lambda": list(rep.lam.weights),
        "intervals": [[a, b] for a, b in rep.intervals],
        "gap": list(rep.gap),
    }
