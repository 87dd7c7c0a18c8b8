"""Goal signals: one-dimensional distribution views of a respondent group.

Three kinds are supported, all aligned with a group's ordered parameter
values:

* quantity        - member counts per parameter value,
* concentration   - quantity divided by the superset population counts,
* difference      - componentwise difference of two concentration signals.

``concentration_to_quantity`` maps a (possibly modified) concentration
signal back into an integer quantity signal with a prescribed total, which
is how concentration-domain edits become realizable in the microfile.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import SignalError
from .microfile import GroupSpec, Microfile, check_group_in_superset, members, superset_members
from .redistribute import round_to_integers

__all__ = [
    "GoalSignal",
    "quantity_signal",
    "concentration_signal",
    "difference_signal",
    "concentration_to_quantity",
]

logger = logging.getLogger(__name__)

KINDS = ("quantity", "concentration", "difference")


@dataclass(frozen=True)
class GoalSignal:
    """Signal values over an ordered parameter axis.

    Concentration signals retain their denominators so they can later be
    converted back into quantities.
    """

    kind: str
    values: np.ndarray
    parameter_order: tuple[str, ...]
    denominators: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SignalError(f"unknown signal kind {self.kind!r}")
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 1 or values.size != len(self.parameter_order):
            raise SignalError("signal length must match the parameter order")
        if self.kind == "quantity":
            if np.any(values < 0) or np.any(values != np.floor(values)):
                raise SignalError("quantity signals must hold non-negative integers")
        if self.denominators is not None:
            den = np.asarray(self.denominators, dtype=float)
            object.__setattr__(self, "denominators", den)
            if den.shape != values.shape or np.any(den <= 0):
                raise SignalError("denominators must be positive and match the signal length")
        elif self.kind == "concentration":
            raise SignalError("concentration signals must carry denominators")
        values.setflags(write=False)
        if self.denominators is not None:
            self.denominators.setflags(write=False)

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def total(self) -> float:
        return float(self.values.sum())


def _ordinal_key(value: float) -> str:
    return str(int(value)) if value == int(value) else repr(float(value))


def _position_counts(m: Microfile, g: GroupSpec, indices: np.ndarray, strict: bool) -> np.ndarray:
    order = {value: i for i, value in enumerate(g.parameter_order)}
    col = m.column(g.parameter)
    attr = m.attribute(g.parameter)
    if attr.kind == "nominal":
        keys = col[indices]
    else:
        keys = np.array([_ordinal_key(v) for v in col[indices]], dtype=str)
    counts = np.zeros(len(order))
    unknown = []
    if keys.size:
        for value, n in zip(*np.unique(keys, return_counts=True)):
            pos = order.get(str(value))
            if pos is None:
                unknown.append(str(value))
            else:
                counts[pos] = n
    if unknown and strict:
        raise SignalError(
            f"parameter values outside the declared order: {sorted(unknown)}"
        )
    return counts


def quantity_signal(m: Microfile, g: GroupSpec) -> GoalSignal:
    """Count group members at each declared parameter value.

    Raises if any member carries a parameter value missing from the order;
    the total always equals the number of members.
    """
    idx = members(m, g)
    counts = _position_counts(m, g, idx, strict=True)
    return GoalSignal("quantity", counts, g.parameter_order)


def concentration_signal(m: Microfile, g: GroupSpec) -> GoalSignal:
    """Member counts divided by superset counts, per parameter value."""
    if g.superset_vital is None:
        raise SignalError("concentration signal requires a superset population")
    check_group_in_superset(m, g)
    q = quantity_signal(m, g)
    rho = _position_counts(m, g, superset_members(m, g), strict=False)
    zero = np.flatnonzero(rho == 0)
    if zero.size:
        value = g.parameter_order[int(zero[0])]
        raise SignalError(
            f"superset population is empty at parameter value {value!r}; "
            "concentration undefined"
        )
    return GoalSignal("concentration", q.values / rho, g.parameter_order, denominators=rho)


def difference_signal(main: GoalSignal, subordinate: GoalSignal) -> GoalSignal:
    """Componentwise difference of two concentration signals over one axis.

    The result keeps the main signal's denominators so it can be pushed
    back into the main group's quantity domain.
    """
    if main.kind != "concentration" or subordinate.kind != "concentration":
        raise SignalError("difference requires two concentration signals")
    if main.parameter_order != subordinate.parameter_order:
        raise SignalError("signals are built over different parameter orders")
    return GoalSignal(
        "difference",
        main.values - subordinate.values,
        main.parameter_order,
        denominators=main.denominators,
    )


def concentration_to_quantity(c_target: GoalSignal, total: int) -> GoalSignal:
    """Integer quantity signal proportional to concentration times denominator.

    Negative concentrations are clamped to zero with a warning; the result
    sums exactly to ``total`` via largest-remainder rounding.
    """
    if c_target.denominators is None:
        raise SignalError("conversion requires a signal with denominators")
    if total <= 0:
        raise SignalError("total to distribute must be positive")
    c = c_target.values
    if np.any(c < 0):
        logger.warning(
            "clamping %d negative concentration value(s) to zero before conversion",
            int((c < 0).sum()),
        )
        c = np.where(c < 0, 0.0, c)
    mass = c * c_target.denominators
    if not mass.any():
        raise SignalError("no mass to distribute: all concentration values are zero")
    scaled = mass * (total / mass.sum())
    counts = round_to_integers(scaled, total)
    return GoalSignal("quantity", counts, c_target.parameter_order)
