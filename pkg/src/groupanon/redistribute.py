"""Signal redistribution: constrain, re-solve and repair approximation coefficients.

The anonymization edit happens here.  Bounds on selected positions of the
low-frequency signal component become linear constraints over candidate
approximation coefficients (rows of the reconstruction matrix), a solution
is found by linear programming, and the signal is reassembled with its
detail coefficients untouched, which is what preserves the high-frequency
behaviour.  Repairs then restore realizability: a non-negativity shift, a
sum-preserving rescale or a mean/std renormalization, and integer rounding
for count signals.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .errors import ConstraintError, InfeasibleError, UnboundedError
from .wavelet import (
    WaveletDecomposition,
    approximation_component,
    detail_component,
    reconstruction_matrix,
)

__all__ = [
    "ConstraintRow",
    "Objective",
    "ConstraintSpec",
    "LinearProgram",
    "RowCheck",
    "RedistributionResult",
    "build_constraints",
    "solve_constraints",
    "check_solution",
    "satisfies",
    "reassemble",
    "redistribute_signal",
    "make_nonnegative",
    "mean_fix",
    "normalize_mean_std",
    "round_to_integers",
]

logger = logging.getLogger(__name__)

RELATIONS = ("<=", ">=")


@dataclass(frozen=True)
class ConstraintRow:
    """One bound: signal position (1-based), relation, numeric bound or "original".

    An "original" bound resolves to the current approximation-component
    value at that position.
    """

    position: int
    relation: str
    bound: float | str = "original"

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise ConstraintError(f"relation must be one of {RELATIONS}")
        if isinstance(self.bound, str) and self.bound != "original":
            raise ConstraintError(f"bound must be a number or 'original', got {self.bound!r}")


@dataclass(frozen=True)
class Objective:
    """What to optimize: plain feasibility, or extremize chosen output positions."""

    kind: str = "feasibility"
    positions: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in ("feasibility", "maximize", "minimize"):
            raise ConstraintError(f"unknown objective kind {self.kind!r}")
        if self.kind != "feasibility" and not self.positions:
            raise ConstraintError(f"objective {self.kind!r} needs at least one position")


@dataclass(frozen=True)
class ConstraintSpec:
    rows: tuple[ConstraintRow, ...]
    objective: Objective = Objective()
    nonnegative: bool = True

    def __post_init__(self):
        if not self.rows:
            raise ConstraintError("constraint spec must contain at least one row")


@dataclass(frozen=True)
class LinearProgram:
    """Dense inequality system A x <= b over approximation coefficients.

    ``rows`` keeps the operator-facing form of every constraint (raw
    reconstruction-matrix coefficients, relation, resolved bound) for
    reporting and conflict extraction.
    """

    a_ub: np.ndarray
    b_ub: np.ndarray
    cost: np.ndarray
    nonnegative: bool
    rows: tuple[tuple[np.ndarray, str, float], ...] = field(repr=False)

    @property
    def n_vars(self) -> int:
        return int(self.a_ub.shape[1])

    def describe(self) -> list[str]:
        out = []
        for coeffs, relation, bound in self.rows:
            terms = [
                f"{c:+.3f}*a({j + 1})" for j, c in enumerate(coeffs) if abs(c) >= 5e-4
            ]
            out.append(f"{' '.join(terms)} {relation} {bound:.3f}")
        return out


def build_constraints(dec: WaveletDecomposition, spec: ConstraintSpec) -> LinearProgram:
    """Turn position bounds into a linear program over new coefficients.

    Row (i, rel, b) becomes sum_j R[i-1, j] * a_j rel b, with R the
    reconstruction matrix of the decomposition.
    """
    m = dec.signal_length
    matrix = reconstruction_matrix(dec.filter, dec.level, m)
    original = approximation_component(dec)
    for row in spec.rows:
        if not 1 <= row.position <= m:
            raise ConstraintError(
                f"constraint position {row.position} outside 1..{m}"
            )
    for pos in spec.objective.positions:
        if not 1 <= pos <= m:
            raise ConstraintError(f"objective position {pos} outside 1..{m}")

    a_rows, b_vals, meta = [], [], []
    for row in spec.rows:
        coeffs = matrix[row.position - 1]
        bound = float(original[row.position - 1]) if row.bound == "original" else float(row.bound)
        meta.append((coeffs, row.relation, bound))
        if row.relation == "<=":
            a_rows.append(coeffs)
            b_vals.append(bound)
        else:
            a_rows.append(-coeffs)
            b_vals.append(-bound)

    cost = np.zeros(matrix.shape[1])
    if spec.objective.kind != "feasibility":
        direction = -1.0 if spec.objective.kind == "maximize" else 1.0
        for pos in spec.objective.positions:
            cost += direction * matrix[pos - 1]

    return LinearProgram(
        a_ub=np.array(a_rows),
        b_ub=np.array(b_vals),
        cost=cost,
        nonnegative=spec.nonnegative,
        rows=tuple(meta),
    )


def _run_lp(lp: LinearProgram, row_subset: np.ndarray | None = None):
    a, b = lp.a_ub, lp.b_ub
    if row_subset is not None:
        a, b = a[row_subset], b[row_subset]
    bounds = [(0, None) if lp.nonnegative else (None, None)] * lp.n_vars
    return linprog(lp.cost, A_ub=a, b_ub=b, bounds=bounds, method="highs")


def _conflict_subset(lp: LinearProgram) -> list[str]:
    """Deletion filter: drop rows whose removal keeps the system infeasible."""
    keep = list(range(len(lp.b_ub)))
    for idx in list(keep):
        trial = [i for i in keep if i != idx]
        if not trial:
            break
        res = _run_lp(lp, np.array(trial))
        if res.status == 2:
            keep = trial
    described = lp.describe()
    return [described[i] for i in keep]


def solve_constraints(lp: LinearProgram, warm_start: np.ndarray | None = None) -> np.ndarray:
    """Find coefficients satisfying the system, optionally optimizing.

    With a pure feasibility objective a satisfying ``warm_start`` (typically
    the original coefficients) is returned as-is, which keeps identity
    configurations exactly identity.
    """
    if warm_start is not None and not lp.cost.any():
        start = np.asarray(warm_start, dtype=float)
        if start.size == lp.n_vars and satisfies(lp, start):
            return start.copy()
    res = _run_lp(lp)
    if res.status == 2:
        conflict = _conflict_subset(lp)
        raise InfeasibleError(
            "constraint system is infeasible; irreducible conflict (best effort): "
            + "; ".join(conflict),
            conflict=conflict,
        )
    if res.status == 3:
        raise UnboundedError("objective is unbounded over the constraint system")
    if res.status != 0:
        raise ConstraintError(f"linear programming failed: {res.message}")
    return np.asarray(res.x, dtype=float)


@dataclass(frozen=True)
class RowCheck:
    """Evaluation of one constraint row at a candidate point."""

    position_text: str
    lhs: float
    relation: str
    bound: float
    satisfied: bool
    violation: float


def check_solution(lp: LinearProgram, coeffs: np.ndarray, tol: float = 1e-9) -> list[RowCheck]:
    """Evaluate every row at ``coeffs``; violations carry their magnitude."""
    coeffs = np.asarray(coeffs, dtype=float)
    out = []
    for text, (row, relation, bound) in zip(lp.describe(), lp.rows):
        lhs = float(row @ coeffs)
        gap = lhs - bound if relation == "<=" else bound - lhs
        out.append(
            RowCheck(
                position_text=text,
                lhs=lhs,
                relation=relation,
                bound=bound,
                satisfied=gap <= tol,
                violation=max(gap, 0.0),
            )
        )
    return out


def satisfies(lp: LinearProgram, coeffs: np.ndarray, tol: float = 1e-9) -> bool:
    return all(check.satisfied for check in check_solution(lp, coeffs, tol))


def reassemble(dec: WaveletDecomposition, coeffs: np.ndarray) -> np.ndarray:
    """New signal from replacement approximation coefficients plus kept details."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != dec.approx.shape:
        raise ConstraintError(
            f"expected {dec.approx.size} coefficients, got {coeffs.size}"
        )
    matrix = reconstruction_matrix(dec.filter, dec.level, dec.signal_length)
    return matrix @ coeffs + detail_component(dec)


def make_nonnegative(values: np.ndarray, shift: float | None = None, margin: float = 0.0):
    """Add a constant making every component non-negative.

    When ``shift`` is omitted it defaults to ceil(-min) plus ``margin`` for
    signals with negative entries and to 0 otherwise.  Returns the shifted
    signal and the shift used.
    """
    values = np.asarray(values, dtype=float)
    if shift is None:
        lowest = float(values.min()) if values.size else 0.0
        shift = 0.0 if lowest >= 0 else math.ceil(-lowest) + margin
    return values + shift, float(shift)


def mean_fix(values: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Rescale so the sum (hence mean) matches the reference signal."""
    values = np.asarray(values, dtype=float)
    reference = np.asarray(reference, dtype=float)
    total = values.sum()
    if total == 0:
        raise ConstraintError("cannot fix the mean of a zero-sum signal")
    return values * (reference.sum() / total)


def normalize_mean_std(values: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Affinely map the signal onto the reference mean and standard deviation.

    Sample statistics (denominator m - 1) on both sides; the input must
    have positive spread.
    """
    values = np.asarray(values, dtype=float)
    reference = np.asarray(reference, dtype=float)
    std_in = values.std(ddof=1)
    std_ref = reference.std(ddof=1)
    if std_in == 0 or std_ref == 0:
        raise ConstraintError("mean/std normalization needs non-constant signals")
    return (values - values.mean()) * (std_ref / std_in) + reference.mean()


def round_to_integers(values: np.ndarray, total: int) -> np.ndarray:
    """Largest-remainder rounding to non-negative integers summing to ``total``.

    Ties in the remainder break toward the lower index.  ``total`` must lie
    between the floor-sum and ceil-sum of the input, so every component
    moves by less than 1.
    """
    values = np.asarray(values, dtype=float)
    if np.any(values < 0):
        raise ConstraintError("rounding requires non-negative values")
    if total < 0:
        raise ConstraintError("total must be non-negative")
    floors = np.floor(values)
    remainders = values - floors
    out = floors.astype(np.int64)
    short = int(total - out.sum())
    if short < 0 or short > int(np.ceil(values).sum() - out.sum()):
        raise ConstraintError(
            f"total {total} is unreachable by rounding a signal with sum {values.sum():.6g}"
        )
    if short:
        order = np.argsort(-remainders, kind="stable")
        out[order[:short]] += 1
    return out


@dataclass(frozen=True)
class RedistributionResult:
    """Everything produced by one redistribution run.

    ``reassembled`` is the raw re-solved signal, ``final`` the signal after
    the repair chain; the detail coefficients of ``reassembled`` match the
    input decomposition by construction.
    """

    coefficients: np.ndarray
    reassembled: np.ndarray
    final: np.ndarray
    shift: float
    applied_repair: str


REPAIRS = ("none", "mean_fix", "mean_std")


def redistribute_signal(
    dec: WaveletDecomposition,
    spec: ConstraintSpec,
    *,
    solution: np.ndarray | None = None,
    shift: float | None = None,
    margin: float = 0.0,
    repair: str = "none",
    reference: np.ndarray | None = None,
) -> RedistributionResult:
    """One-call redistribution: solve, reassemble, shift, repair.

    A declared ``solution`` skips the solver.  ``repair`` restores the
    ``reference`` signal's sum ("mean_fix") or mean and standard deviation
    ("mean_std") after the non-negativity shift; integer rounding for count
    signals is left to the caller.
    """
    if repair not in REPAIRS:
        raise ConstraintError(f"repair must be one of {REPAIRS}, got {repair!r}")
    if repair != "none" and reference is None:
        raise ConstraintError(f"repair {repair!r} needs a reference signal")
    lp = build_constraints(dec, spec)
    if solution is None:
        coeffs = solve_constraints(lp, warm_start=dec.approx)
    else:
        coeffs = np.asarray(solution, dtype=float)
    out = reassemble(dec, coeffs)
    shifted, used = make_nonnegative(out, shift, margin)
    if repair == "mean_fix":
        final = mean_fix(shifted, reference)
    elif repair == "mean_std":
        final = normalize_mean_std(shifted, reference)
    else:
        final = shifted
    return RedistributionResult(
        coefficients=coeffs,
        reassembled=out,
        final=final,
        shift=used,
        applied_repair=repair,
    )
