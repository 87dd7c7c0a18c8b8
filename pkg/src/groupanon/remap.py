"""Realize a target quantity signal by swapping parameter values between records.

A swap exchanges only the parameter-attribute values of a group member and
a non-member partner, moving the member to a new position of the goal
signal while every other attribute of both records stays put.  Partners are
drawn from the superset population when the group declares one, so
concentration denominators are invariant under the plan.

Pair selection is greedy: positions are processed largest imbalance first
and each step picks, among at most ``candidate_cap`` sampled member/partner
pairs, the pair with the smallest influential-metric distance, breaking
ties toward the lower record-index pair.  Sampling is driven by a seeded
generator, so plans are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RemapError
from .microfile import GroupSpec, Microfile, check_group_in_superset, members, superset_members
from .signals import GoalSignal

__all__ = [
    "InfluentialWeights",
    "SwapPlan",
    "influential_metric",
    "plan_swaps",
    "apply_swaps",
]


@dataclass(frozen=True)
class InfluentialWeights:
    """Attribute weights for record closeness.

    Ordinal attributes contribute a weighted squared relative difference,
    nominal attributes a weighted squared category factor: ``chi_same``
    when the two values agree, ``chi_diff`` when they do not.
    """

    ordinal: dict[str, float]
    nominal: dict[str, float]
    chi_same: float = 0.0
    chi_diff: float = 1.0

    def __post_init__(self):
        if self.chi_same > self.chi_diff:
            raise RemapError("matching categories must not cost more than mismatching")
        weights = list(self.ordinal.values()) + list(self.nominal.values())
        if any(w < 0 for w in weights):
            raise RemapError("weights must be non-negative")
        if not any(w > 0 for w in weights):
            raise RemapError("at least one influential weight must be positive")

    @classmethod
    def from_microfile(
        cls, m: Microfile, chi_same: float = 0.0, chi_diff: float = 1.0
    ) -> "InfluentialWeights":
        """Collect every vital and influential attribute with its declared weight."""
        ordinal, nominal = {}, {}
        for attr in m.attributes:
            if attr.role in ("vital", "influential"):
                (ordinal if attr.kind == "ordinal" else nominal)[attr.name] = attr.weight
        return cls(ordinal=ordinal, nominal=nominal, chi_same=chi_same, chi_diff=chi_diff)


def influential_metric(rec_a, rec_b, w: InfluentialWeights) -> float:
    """Weighted squared distance between two records over influential attributes.

    The ordinal term for a pair of zeros is 0 (equal values, no distance);
    negative ordinal values are rejected because the relative difference is
    no longer a distance there.
    """
    total = 0.0
    for name, weight in w.ordinal.items():
        try:
            a, b = float(rec_a[name]), float(rec_b[name])
        except KeyError:
            raise RemapError(f"record lacks influential attribute {name!r}") from None
        if a < 0 or b < 0:
            raise RemapError(
                f"negative value in ordinal influential attribute {name!r}; metric undefined"
            )
        denom = a + b
        if denom > 0:
            total += weight * ((a - b) / denom) ** 2
    for name, weight in w.nominal.items():
        try:
            same = rec_a[name] == rec_b[name]
        except KeyError:
            raise RemapError(f"record lacks influential attribute {name!r}") from None
        factor = w.chi_same if same else w.chi_diff
        total += weight * factor * factor
    return total


@dataclass(frozen=True)
class SwapPlan:
    """Ordered parameter-value swaps: (member record, partner record) pairs."""

    parameter: str
    swaps: tuple[tuple[int, int], ...]
    costs: tuple[float, ...]

    def __post_init__(self):
        seen = set()
        for a, b in self.swaps:
            if a in seen or b in seen or a == b:
                raise RemapError("a record may appear in at most one swap")
            seen.add(a)
            seen.add(b)

    @property
    def total_cost(self) -> float:
        return float(sum(self.costs))

    def __len__(self) -> int:
        return len(self.swaps)


class _PairCost:
    """Vectorized influential metric over record-index arrays."""

    def __init__(self, m: Microfile, w: InfluentialWeights):
        self.ordinal = []
        for name, weight in w.ordinal.items():
            col = m.column(name)
            if np.any(col < 0):
                raise RemapError(
                    f"negative value in ordinal influential attribute {name!r}; metric undefined"
                )
            self.ordinal.append((weight, col))
        self.nominal = []
        for name, weight in w.nominal.items():
            _, codes = np.unique(m.column(name), return_inverse=True)
            self.nominal.append((weight, codes))
        self.same_sq = w.chi_same**2
        self.diff_sq = w.chi_diff**2

    def __call__(self, left: np.ndarray, right: np.ndarray) -> np.ndarray:
        cost = np.zeros(left.shape, dtype=float)
        for weight, col in self.ordinal:
            a, b = col[left], col[right]
            denom = a + b
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = np.where(denom > 0, (a - b) / np.where(denom > 0, denom, 1.0), 0.0)
            cost += weight * ratio * ratio
        for weight, codes in self.nominal:
            cost += weight * np.where(codes[left] == codes[right], self.same_sq, self.diff_sq)
        return cost


def plan_swaps(
    m: Microfile,
    g: GroupSpec,
    q_target: GoalSignal,
    w: InfluentialWeights,
    candidate_cap: int = 10_000,
    rng: np.random.Generator | int | None = None,
) -> SwapPlan:
    """Greedy plan transforming the group's quantity signal into ``q_target``.

    The target must hold the member total (swaps move members, never create
    them) and every position gaining members needs enough partners there:
    non-members, restricted to the superset population when one is declared.

    ``rng`` may be a seed or a generator; when omitted a fixed default seed
    is used, so identical inputs always produce identical plans.
    """
    if candidate_cap < 1:
        raise RemapError("candidate_cap must be positive")
    if q_target.kind != "quantity":
        raise RemapError("target must be a quantity signal")
    if q_target.parameter_order != g.parameter_order:
        raise RemapError("target signal is built over a different parameter order")
    rng = np.random.default_rng(0 if rng is None else rng)

    member_idx = members(m, g)
    target = q_target.values.astype(np.int64)
    if g.superset_vital is not None:
        check_group_in_superset(m, g)
        pool_mask = np.zeros(m.n_records, dtype=bool)
        pool_mask[superset_members(m, g)] = True
    else:
        pool_mask = np.ones(m.n_records, dtype=bool)
    pool_mask[member_idx] = False

    order = {value: i for i, value in enumerate(g.parameter_order)}
    param = m.column(g.parameter)
    positions = np.full(m.n_records, -1, dtype=np.int64)
    for value, pos in order.items():
        positions[param == value] = pos

    current = np.zeros(len(order), dtype=np.int64)
    member_at: list[np.ndarray] = [np.empty(0, np.int64)] * len(order)
    partner_at: list[np.ndarray] = [np.empty(0, np.int64)] * len(order)
    member_pos = positions[member_idx]
    if np.any(member_pos < 0):
        bad = np.unique(param[member_idx[member_pos < 0]])
        raise RemapError(f"members at parameter values outside the order: {list(bad)}")
    for pos in range(len(order)):
        member_at[pos] = member_idx[member_pos == pos]
        current[pos] = member_at[pos].size
        partner_at[pos] = np.flatnonzero(pool_mask & (positions == pos))

    if int(current.sum()) != int(target.sum()):
        raise RemapError(
            f"target total {int(target.sum())} differs from member total {int(current.sum())}"
        )
    deficit = target - current
    for pos in np.flatnonzero(deficit > 0):
        if partner_at[pos].size < deficit[pos]:
            raise RemapError(
                f"not enough partners at parameter value {g.parameter_order[pos]!r}: "
                f"need {int(deficit[pos])}, have {int(partner_at[pos].size)}"
            )

    pair_cost = _PairCost(m, w)
    swaps: list[tuple[int, int]] = []
    costs: list[float] = []
    surplus = -deficit
    while True:
        donor = int(np.argmax(surplus))
        recipient = int(np.argmax(-surplus))
        if surplus[donor] <= 0:
            break
        mem = member_at[donor]
        par = partner_at[recipient]
        n_pairs = mem.size * par.size
        if n_pairs <= candidate_cap:
            mi = np.repeat(np.arange(mem.size), par.size)
            pi = np.tile(np.arange(par.size), mem.size)
        else:
            mi = rng.integers(0, mem.size, candidate_cap)
            pi = rng.integers(0, par.size, candidate_cap)
        cand_cost = pair_cost(mem[mi], par[pi])
        best = cand_cost.min()
        tied = np.flatnonzero(cand_cost == best)
        key = mem[mi[tied]].astype(np.int64) * m.n_records + par[pi[tied]]
        choice = tied[int(np.argmin(key))]
        rec_m, rec_p = int(mem[mi[choice]]), int(par[pi[choice]])

        swaps.append((rec_m, rec_p))
        costs.append(float(best))
        member_at[donor] = mem[mem != rec_m]
        partner_at[recipient] = par[par != rec_p]
        surplus[donor] -= 1
        surplus[recipient] += 1

    return SwapPlan(parameter=g.parameter, swaps=tuple(swaps), costs=tuple(costs))


def apply_swaps(m: Microfile, plan: SwapPlan) -> Microfile:
    """New microfile with each swap's parameter values exchanged.

    Only the plan's parameter column changes; the record count and every
    other column are byte-identical.
    """
    name = plan.parameter
    column = m.column(name).copy()
    n = m.n_records
    for a, b in plan.swaps:
        if not (0 <= a < n and 0 <= b < n):
            raise RemapError(f"swap ({a}, {b}) is out of range for {n} records")
        column[a], column[b] = column[b], column[a]
    return m.with_column(name, column)
