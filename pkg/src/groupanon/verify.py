"""Check every bundled reference value against a fresh computation.

Each row of the verification table recomputes one checkpoint of the bundled
worked example from the primitive filter-bank operations and compares it to
the frozen vector at its stated tolerance.  One check is special: the
bundled concentration-case solution genuinely violates one row of its own
constraint system (see :mod:`groupanon.reference`), so the verifier asserts
the violation is exactly the known one and reports it with status KNOWN
rather than PASS or FAIL.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import reference as ref
from .microfile import members
from .redistribute import make_nonnegative, mean_fix, round_to_integers
from .signals import quantity_signal
from .wavelet import FILTERS, conv_down, up_conv

__all__ = ["CheckRow", "verify_reference_values", "format_table", "has_failures"]


@dataclass(frozen=True)
class CheckRow:
    name: str
    status: str  # PASS, FAIL or KNOWN
    max_delta: float
    tolerance: float
    detail: str = ""


def _qmf(low: np.ndarray) -> np.ndarray:
    k = np.arange(low.size)
    return (-1.0) ** (k + 1) * low[::-1]


def _matrix(low: np.ndarray, length: int, level: int) -> np.ndarray:
    ncoef = length >> level
    out = np.empty((length, ncoef))
    for j in range(ncoef):
        unit = np.zeros(ncoef)
        unit[j] = 1.0
        col = unit
        for _ in range(level):
            col = up_conv(col, low)
        out[:, j] = col
    return out


def _compare(name: str, got, expected, tol: float) -> CheckRow:
    delta = float(np.max(np.abs(np.asarray(got) - np.asarray(expected))))
    return CheckRow(name, "PASS" if delta <= tol else "FAIL", delta, tol)


def _system_rows(system, matrix):
    for position, relation, bound, printed in system:
        yield matrix[position - 1], relation, float(bound), np.array(printed)


def _max_violation(system, matrix, solution):
    worst = 0.0
    where = None
    for position, relation, bound, _ in system:
        lhs = float(matrix[position - 1] @ solution)
        gap = lhs - bound if relation == "<=" else bound - lhs
        if gap > worst:
            worst, where = gap, position
    return worst, where


def verify_reference_values(lowpass=None, fixture_csv=None) -> list[CheckRow]:
    """Recompute all reference checkpoints; optionally override the low-pass taps
    (sensitivity checks) or the fixture CSV path."""
    low = np.asarray(FILTERS["db2"].lowpass if lowpass is None else lowpass, float)
    high = _qmf(low)
    rows: list[CheckRow] = []

    # quantity case
    q = ref.QUANTITY
    a1 = conv_down(q, low)
    a2 = conv_down(a1, low)
    d1, d2 = conv_down(q, high), conv_down(a1, high)
    rows.append(_compare("quantity level-2 approx coefficients", a2, ref.QUANTITY_APPROX_2, 1e-3))
    rows.append(_compare("quantity level-2 detail coefficients", d2, ref.QUANTITY_DETAIL_2, 1e-3))
    approx_comp = up_conv(up_conv(a2, low), low)
    detail_comp = up_conv(d1, high) + up_conv(up_conv(d2, high), low)
    rows.append(_compare("quantity approximation component", approx_comp,
                         ref.QUANTITY_APPROX_COMPONENT, 1e-3))
    rows.append(_compare("quantity detail component", detail_comp,
                         ref.QUANTITY_DETAIL_COMPONENT, 1e-3))

    matrix = _matrix(low, q.size, 2)
    coef_delta = max(
        float(np.max(np.abs(coeffs - printed)))
        for coeffs, _, _, printed in _system_rows(ref.QUANTITY_SYSTEM, matrix)
    )
    rows.append(CheckRow("quantity constraint-system coefficients",
                         "PASS" if coef_delta <= 1e-3 else "FAIL", coef_delta, 1e-3))

    violation, position = _max_violation(ref.QUANTITY_SYSTEM, matrix, ref.QUANTITY_SOLUTION)
    rows.append(CheckRow("quantity solution satisfies its system",
                         "PASS" if violation <= 1e-9 else "FAIL", violation, 1e-9,
                         detail="" if violation <= 1e-9 else f"violated at position {position}"))

    new_approx = matrix @ ref.QUANTITY_SOLUTION
    rows.append(_compare("quantity new approximation component", new_approx,
                         ref.QUANTITY_NEW_APPROX_COMPONENT, 1e-2))
    qhat = new_approx + detail_comp
    rows.append(_compare("quantity reassembled signal", qhat, ref.QUANTITY_REASSEMBLED, 1e-2))

    shifted, _ = make_nonnegative(qhat, ref.QUANTITY_SHIFT)
    final = round_to_integers(mean_fix(shifted, q), int(q.sum()))
    worst = int(np.max(np.abs(final - ref.QUANTITY_FINAL)))
    sum_ok = int(final.sum()) == int(q.sum())
    rows.append(CheckRow("quantity final rounded signal",
                         "PASS" if worst <= 1 and sum_ok else "FAIL", float(worst), 1.0,
                         detail=f"sum {int(final.sum())}"))

    # concentration case
    c = ref.CONCENTRATION
    ca1 = conv_down(c, low)
    ca2, cd2 = conv_down(ca1, low), conv_down(ca1, high)
    cd1 = conv_down(c, high)
    rows.append(_compare("concentration level-2 approx coefficients", ca2,
                         ref.CONCENTRATION_APPROX_2, 1e-3))
    rows.append(_compare("concentration level-2 detail coefficients", cd2,
                         ref.CONCENTRATION_DETAIL_2, 1e-3))
    c_approx = up_conv(up_conv(ca2, low), low)
    c_detail = up_conv(cd1, high) + up_conv(up_conv(cd2, high), low)
    rows.append(_compare("concentration approximation component", c_approx,
                         ref.CONCENTRATION_APPROX_COMPONENT, 1e-3))
    rows.append(_compare("concentration detail component", c_detail,
                         ref.CONCENTRATION_DETAIL_COMPONENT, 1e-3))

    coef_delta = max(
        float(np.max(np.abs(coeffs - printed)))
        for coeffs, _, _, printed in _system_rows(ref.CONCENTRATION_SYSTEM, matrix)
    )
    rows.append(CheckRow("concentration constraint-system coefficients",
                         "PASS" if coef_delta <= 1e-3 else "FAIL", coef_delta, 1e-3))

    violation, position = _max_violation(ref.CONCENTRATION_SYSTEM, matrix,
                                         ref.CONCENTRATION_SOLUTION)
    expected = ref.CONCENTRATION_KNOWN_VIOLATION
    if position == expected["position"] and abs(violation - expected["violation"]) < 2e-4:
        rows.append(CheckRow(
            "concentration solution vs its system", "KNOWN", violation, 0.0,
            detail=(f"bundled solution violates the position-{position} row by "
                    f"{violation:.2e}; retained verbatim, documented inconsistency"),
        ))
    else:
        rows.append(CheckRow(
            "concentration solution vs its system", "FAIL", violation, 0.0,
            detail=f"violation pattern changed: position {position}, gap {violation:.2e}",
        ))

    c_new_approx = matrix @ ref.CONCENTRATION_SOLUTION
    rows.append(_compare("concentration new approximation component", c_new_approx,
                         ref.CONCENTRATION_NEW_APPROX_COMPONENT, 1e-3))
    chat = c_new_approx + c_detail
    rows.append(_compare("concentration reassembled signal", chat,
                         ref.CONCENTRATION_REASSEMBLED, 1e-3))
    shifted_c, _ = make_nonnegative(chat, ref.CONCENTRATION_SHIFT)
    rows.append(_compare("concentration shifted signal", shifted_c,
                         ref.CONCENTRATION_SHIFTED, 1e-3))

    rows.append(_fixture_check(fixture_csv))
    return rows


def _fixture_check(fixture_csv) -> CheckRow:
    name = "fixture microfile group counts"
    try:
        m = ref.load_quantity_microfile(fixture_csv)
    except Exception as exc:
        missing = isinstance(exc, FileNotFoundError) or "cannot read" in str(exc)
        detail = "fixture missing" if missing else f"fixture unreadable: {exc}"
        return CheckRow(name, "FAIL", float("nan"), 0.0, detail=detail)
    group = ref.fixture_group()
    total = members(m, group).size
    counts = quantity_signal(m, group).values
    ok = total == int(ref.QUANTITY.sum()) and np.array_equal(counts, ref.QUANTITY)
    return CheckRow(name, "PASS" if ok else "FAIL",
                    float(np.max(np.abs(counts - ref.QUANTITY))), 0.0,
                    detail=f"{total} members")


def has_failures(rows: list[CheckRow]) -> bool:
    return any(row.status == "FAIL" for row in rows)


def format_table(rows: list[CheckRow]) -> str:
    width = max(len(row.name) for row in rows)
    lines = []
    for row in rows:
        delta = "nan" if np.isnan(row.max_delta) else f"{row.max_delta:.3e}"
        line = f"{row.name:<{width}}  {row.status:<5}  delta {delta} (tol {row.tolerance:g})"
        if row.detail:
            line += f"  [{row.detail}]"
        lines.append(line)
    failed = sum(r.status == "FAIL" for r in rows)
    known = sum(r.status == "KNOWN" for r in rows)
    summary = f"{len(rows)} checks: {len(rows) - failed - known} passed, {failed} failed"
    if known:
        summary += f", {known} known discrepancy"
    lines.append(summary)
    return "\n".join(lines)
