"""Problem instances, solutions, outcomes and weight vectors.

The package works on binary linear maximization problems with ``k``
objective rows, ``m`` knapsack-style constraint rows and ``n`` 0-1
variables.  Instances in "MOMKP mode" (the default, and the only mode the
``momkp-v1`` file format carries) additionally require nonnegative
integral coefficients and strictly positive right-hand sides.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, DomainError, ParameterError, ParseError

FORMAT_NAME = "momkp-v1"

#: smallest weight component accepted by the simplex sampler
MIN_WEIGHT_COMPONENT = 1e-9

#: tolerance on the simplex-sum invariant of weight vectors
SIMPLEX_SUM_TOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class MomipInstance:
    """A binary linear multi-objective problem: max Cx s.t. Ax <= b, x in {0,1}^n."""

    name: str
    objectives: np.ndarray  # (k, n)
    constraints: np.ndarray  # (m, n)
    rhs: np.ndarray  # (m,)
    momkp: bool = True

    def __post_init__(self):
        object.__setattr__(self, "objectives", _frozen(np.atleast_2d(self.objectives)))
        object.__setattr__(self, "constraints", _frozen(np.atleast_2d(self.constraints)))
        object.__setattr__(self, "rhs", _frozen(np.atleast_1d(self.rhs)))
        k, n = self.objectives.shape
        m, n2 = self.constraints.shape
        if k < 2:
            raise DimensionError(f"need at least 2 objectives, got {k}")
        if n < 1 or m < 1:
            raise DimensionError(f"need n >= 1 and m >= 1, got n={n}, m={m}")
        if n2 != n:
            raise DimensionError(f"constraint rows have {n2} columns, expected {n}")
        if self.rhs.shape != (m,):
            raise DimensionError(f"rhs has length {self.rhs.shape[0]}, expected {m}")
        if self.momkp:
            if np.any(self.objectives < 0) or np.any(self.constraints < 0):
                raise DomainError("MOMKP coefficients must be nonnegative")
            if np.any(self.rhs <= 0):
                raise DomainError("MOMKP right-hand sides must be positive")
            for label, a in (("objective", self.objectives),
                             ("constraint", self.constraints),
                             ("rhs", self.rhs)):
                if np.any(a != np.floor(a)):
                    raise DomainError(f"MOMKP {label} coefficients must be integral")

    @property
    def k(self) -> int:
        return self.objectives.shape[0]

    @property
    def n(self) -> int:
        return self.objectives.shape[1]

    @property
    def m(self) -> int:
        return self.constraints.shape[0]


@dataclass(frozen=True)
class Solution:
    """A 0-1 assignment of the n variables."""

    bits: tuple[int, ...]

    def __post_init__(self):
        if any(b not in (0, 1) for b in self.bits):
            raise DomainError("solution bits must be 0 or 1")

    def key(self) -> int:
        """Total order used for tie-breaking: bits read as a little-endian integer."""
        return sum(b << j for j, b in enumerate(self.bits))


@dataclass(frozen=True)
class Outcome:
    """Objective values f(x) of one solution."""

    values: tuple[float, ...]


@dataclass(frozen=True)
class WeightVector:
    """A point strictly inside the unit simplex; weights the Chebyshev terms."""

    weights: tuple[float, ...]

    def __post_init__(self):
        w = self.weights
        if len(w) < 2:
            raise DimensionError("weight vector needs at least 2 components")
        if any(x <= 0 for x in w):
            raise DomainError(f"weights must be strictly positive, got {w}")
        if abs(sum(w) - 1.0) > SIMPLEX_SUM_TOL:
            raise DomainError(f"weights must sum to 1 within {SIMPLEX_SUM_TOL}, got sum {sum(w)!r}")

    @property
    def k(self) -> int:
        return len(self.weights)


def parse_instance(text: str) -> MomipInstance:
    """Parse a momkp-v1 JSON document into an instance.

    Raises ParseError on malformed input, DimensionError on shape
    mismatches and DomainError on sign/integrality violations.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
    if not isinstance(doc, dict):
        raise ParseError("instance document must be a JSON object")
    if doc.get("format") != FORMAT_NAME:
        raise ParseError(f"field 'format' must be {FORMAT_NAME!r}, got {doc.get('format')!r}")
    for fld in ("name", "k", "n", "m", "objectives", "constraints", "rhs"):
        if fld not in doc:
            raise ParseError(f"missing field {fld!r}")
    k, n, m = doc["k"], doc["n"], doc["m"]
    if not all(isinstance(v, int) and v >= 1 for v in (k, n, m)) or k < 2:
        raise ParseError(f"k, n, m must be positive integers with k >= 2, got {k}, {n}, {m}")

    def matrix(fld, rows, cols):
        val = doc[fld]
        if not isinstance(val, list) or len(val) != rows:
            raise DimensionError(f"field {fld!r} must have {rows} rows")
        for i, row in enumerate(val):
            if not isinstance(row, list) or len(row) != cols:
                raise DimensionError(f"field {fld!r} row {i} must have {cols} entries")
            for x in row:
                if not isinstance(x, (int, float)) or isinstance(x, bool):
                    raise ParseError(f"field {fld!r} row {i} has a non-numeric entry")
        return np.array(val, dtype=np.float64)

    objectives = matrix("objectives", k, n)
    constraints = matrix("constraints", m, n)
    rhs = doc["rhs"]
    if not isinstance(rhs, list) or len(rhs) != m:
        raise DimensionError(f"field 'rhs' must have {m} entries")
    return MomipInstance(
        name=str(doc["name"]),
        objectives=objectives,
        constraints=constraints,
        rhs=np.array(rhs, dtype=np.float64),
        momkp=True,
    )


def serialize_instance(inst: MomipInstance) -> str:
    """Emit momkp-v1 JSON with the canonical key order."""

    def num(x: float):
        return int(x) if x == int(x) else x

    doc = {
        "format": FORMAT_NAME,
        "name": inst.name,
        "k": inst.k,
        "n": inst.n,
        "m": inst.m,
        "objectives": [[num(x) for x in row] for row in inst.objectives],
        "constraints": [[num(x) for x in row] for row in inst.constraints],
        "rhs": [num(x) for x in inst.rhs],
    }
    return json.dumps(doc)


def knapsack_rhs(constraints: np.ndarray, tightness: float) -> np.ndarray:
    """Right-hand sides ceil(tightness * row sum) for a constraint matrix."""
    if not 0.0 < tightness < 1.0:
        raise ParameterError(f"tightness must lie in (0, 1), got {tightness}")
    return np.ceil(tightness * np.asarray(constraints, dtype=np.float64).sum(axis=1))


def generate_instance(k: int, n: int, m: int, seed: int,
                      coeff_range: tuple[int, int] = (1, 100),
                      tightness: float = 0.5,
                      name: str | None = None) -> MomipInstance:
    """Draw a random MOMKP instance; deterministic for a fixed seed.

    Coefficients are uniform integers over ``coeff_range`` (inclusive) and
    b_p = ceil(tightness * sum_j a_{p,j}), so x = 0 is always feasible.
    """
    if k < 2 or n < 1 or m < 1:
        raise ParameterError(f"need k >= 2, n >= 1, m >= 1, got k={k}, n={n}, m={m}")
    lo, hi = coeff_range
    if not (isinstance(lo, (int, np.integer)) and isinstance(hi, (int, np.integer))) or lo > hi or lo < 0:
        raise ParameterError(f"coeff_range must be integers 0 <= lo <= hi, got {coeff_range}")
    if not 0.0 < tightness < 1.0:
        raise ParameterError(f"tightness must lie in (0, 1), got {tightness}")
    rng = np.random.default_rng(seed)
    objectives = rng.integers(lo, hi + 1, size=(k, n)).astype(np.float64)
    constraints = rng.integers(lo, hi + 1, size=(m, n)).astype(np.float64)
    rhs = knapsack_rhs(constraints, tightness)
    return MomipInstance(
        name=name or f"rand-k{k}-n{n}-m{m}-s{seed}",
        objectives=objectives,
        constraints=constraints,
        rhs=rhs,
        momkp=True,
    )


def sample_weight_vectors(k: int, count: int, seed: int) -> list[WeightVector]:
    """Sample ``count`` weight vectors uniformly from the open unit simplex.

    Sorted-uniform-gaps construction; samples with any component below
    MIN_WEIGHT_COMPONENT are rejected and redrawn so the Chebyshev
    scalarization always sees strictly positive weights.
    """
    if k < 2 or count < 1:
        raise ParameterError(f"need k >= 2 and count >= 1, got k={k}, count={count}")
    rng = np.random.default_rng(seed)
    out: list[WeightVector] = []
    while len(out) < count:
        cuts = np.sort(rng.random(k - 1))
        gaps = np.diff(np.concatenate(([0.0], cuts, [1.0])))
        if gaps.min() < MIN_WEIGHT_COMPONENT:
            continue
        # renormalize away the float dust in the last gap so the sum is exact
        gaps = gaps / gaps.sum()
        out.append(WeightVector(tuple(float(g) for g in gaps)))
    return out


def evaluate_outcome(inst: MomipInstance, x: Solution) -> Outcome:
    """f(x): exact when coefficients and bits are integral."""
    if len(x.bits) != inst.n:
        raise DimensionError(f"solution has {len(x.bits)} bits, instance has n={inst.n}")
    bits = np.array(x.bits, dtype=np.float64)
    return Outcome(tuple(float(v) for v in inst.objectives @ bits))


def is_feasible(inst: MomipInstance, x: Solution) -> bool:
    """True iff x satisfies every constraint row."""
    if len(x.bits) != inst.n:
        raise DimensionError(f"solution has {len(x.bits)} bits, instance has n={inst.n}")
    bits = np.array(x.bits, dtype=np.float64)
    return bool(np.all(inst.constraints @ bits <= inst.rhs + 1e-9))


def dominates(a: Outcome, b: Outcome) -> bool:
    """True iff a >= b componentwise and a != b."""
    if len(a.values) != len(b.values):
        raise DimensionError(f"outcomes have lengths {len(a.values)} and {len(b.values)}")
    return all(x >= y for x, y in zip(a.values, b.values)) and a.values != b.values
