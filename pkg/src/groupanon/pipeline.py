"""End-to-end orchestration: load, per-group signal edit, remap, report.

Groups are processed in declared order and each one sees the table already
modified by its predecessors, so declaration order is part of the run's
semantics.  All outputs (modified CSV, report directory) are written only
after every group has succeeded; a stage failure therefore leaves nothing
half-written.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field

import numpy as np

from . import redistribute as rd
from .charts import svg_line_chart
from .config import GroupConfig, PipelineConfig
from .errors import GroupAnonError, StageError
from .microfile import Microfile, load_microfile, write_microfile
from .remap import InfluentialWeights, SwapPlan, apply_swaps, plan_swaps
from .signals import (
    GoalSignal,
    concentration_signal,
    concentration_to_quantity,
    difference_signal,
    quantity_signal,
)
from .wavelet import WaveletDecomposition, decompose, get_filter

__all__ = ["GroupRunResult", "PipelineResult", "run_pipeline", "write_outputs",
           "build_goal_signal", "run_group"]

logger = logging.getLogger(__name__)

_DETAIL_PRESERVATION_TOL = 1e-6


@dataclass
class GroupRunResult:
    """Everything one group's run produced, for the report."""

    name: str
    before: GoalSignal
    decomposition: WaveletDecomposition
    coefficients: np.ndarray
    solution_checks: list
    reassembled: np.ndarray
    shift: float
    final_signal: np.ndarray
    target: GoalSignal
    plan: SwapPlan
    after: GoalSignal
    timings: dict[str, float] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)


@dataclass
class PipelineResult:
    microfile: Microfile
    groups: list[GroupRunResult]
    seed: int


def _stage(stages: dict[str, float], name: str):
    class _Timer:
        def __enter__(self):
            self.t0 = time.perf_counter()

        def __exit__(self, *exc):
            stages[name] = stages.get(name, 0.0) + time.perf_counter() - self.t0

    return _Timer()


def build_goal_signal(m: Microfile, gcfg: GroupConfig) -> GoalSignal:
    """The group's goal signal per its configured kind (single source of truth)."""
    if gcfg.signal == "quantity":
        return quantity_signal(m, gcfg.group)
    if gcfg.signal == "concentration":
        return concentration_signal(m, gcfg.group)
    main = concentration_signal(m, gcfg.group)
    sub = concentration_signal(m, gcfg.subordinate)
    return difference_signal(main, sub)


def run_group(m: Microfile, gcfg: GroupConfig, rng: np.random.Generator) -> tuple[Microfile, GroupRunResult]:
    """Run the four-stage scheme for one group against the current table."""
    timings: dict[str, float] = {}
    warnings: list[str] = []

    def stage(name, fn, *args, **kwargs):
        try:
            with _stage(timings, name):
                return fn(*args, **kwargs)
        except StageError:
            raise
        except GroupAnonError as exc:
            raise StageError(name, gcfg.name, str(exc)) from exc

    before = stage("signal", build_goal_signal, m, gcfg)
    dec = stage("decompose", decompose, before.values, get_filter(gcfg.wavelet_family), gcfg.level)

    if gcfg.target is not None:
        # operator-declared target: skip the signal-editing stages entirely
        target = GoalSignal("quantity", gcfg.target, gcfg.group.parameter_order)
        return _remap_stage(m, gcfg, rng, before, dec, dec.approx.copy(), [],
                            before.values.copy(), 0.0, gcfg.target.copy(), target,
                            timings, warnings, stage)

    lp = stage("constraints", rd.build_constraints, dec, gcfg.constraints)

    if gcfg.solution is not None:
        coeffs = gcfg.solution
        checks = rd.check_solution(lp, coeffs)
        for check in checks:
            if not check.satisfied:
                msg = (
                    f"declared solution violates {check.position_text} "
                    f"by {check.violation:.6g}"
                )
                warnings.append(msg)
                logger.warning("group %s: %s", gcfg.name, msg)
    else:
        coeffs = stage("solve", rd.solve_constraints, lp, warm_start=dec.approx)
        checks = rd.check_solution(lp, coeffs, tol=1e-6)
        bad = [c for c in checks if not c.satisfied]
        if bad:
            raise StageError("solve", gcfg.name,
                             f"solver output violates {bad[0].position_text}")

    reassembled = stage("reassemble", rd.reassemble, dec, coeffs)
    redec = decompose(reassembled, dec.filter, dec.level)
    for j, d in dec.details.items():
        if np.max(np.abs(redec.details[j] - d)) > _DETAIL_PRESERVATION_TOL:
            raise StageError("reassemble", gcfg.name,
                             f"detail coefficients at level {j} drifted")

    def repair():
        return _repair_and_target(m, gcfg, before, reassembled, warnings)

    final, shift, target = stage("repair", repair)
    return _remap_stage(m, gcfg, rng, before, dec, coeffs, checks, reassembled,
                        shift, final, target, timings, warnings, stage)


def _remap_stage(m, gcfg, rng, before, dec, coeffs, checks, reassembled, shift,
                 final, target, timings, warnings, stage):
    plan = stage("plan", plan_swaps, m, gcfg.group, target,
                 InfluentialWeights.from_microfile(m, gcfg.chi_same, gcfg.chi_diff),
                 gcfg.candidate_cap, rng)
    modified = stage("apply", apply_swaps, m, plan)

    after = stage("recount", quantity_signal, modified, gcfg.group)
    if not np.array_equal(after.values, target.values):
        raise StageError("recount", gcfg.name, "swap plan failed to realize the target signal")

    return modified, GroupRunResult(
        name=gcfg.name,
        before=before,
        decomposition=dec,
        coefficients=np.asarray(coeffs, dtype=float),
        solution_checks=checks,
        reassembled=reassembled,
        shift=shift,
        final_signal=final,
        target=target,
        plan=plan,
        after=after,
        timings=timings,
        warnings=warnings,
    )


def _repair_and_target(m: Microfile, gcfg: GroupConfig, before: GoalSignal,
                       reassembled: np.ndarray, warnings: list[str]):
    """Repair chain per signal kind; returns (final signal, shift, quantity target)."""
    total = int(quantity_signal(m, gcfg.group).total)

    if gcfg.signal == "quantity":
        shifted, shift = rd.make_nonnegative(reassembled, gcfg.shift, gcfg.margin)
        if gcfg.repair == "mean_fix":
            shifted = rd.mean_fix(shifted, before.values)
        elif gcfg.repair == "mean_std":
            shifted = rd.normalize_mean_std(shifted, before.values)
            if np.any(shifted < 0):
                warnings.append("mean/std repair produced negatives; clamping to zero")
                shifted = np.where(shifted < 0, 0.0, shifted)
        final = rd.round_to_integers(shifted * (total / shifted.sum()), total).astype(float)
        target = GoalSignal("quantity", final, before.parameter_order)
        return final, shift, target

    if gcfg.signal == "concentration":
        shifted, shift = rd.make_nonnegative(reassembled, gcfg.shift, gcfg.margin)
        c_fin = GoalSignal("concentration", shifted, before.parameter_order,
                           denominators=before.denominators)
        target = concentration_to_quantity(c_fin, total)
        return shifted, shift, target

    # difference: the modified difference is added back onto the subordinate
    # concentrations and the main group absorbs the change
    final, shift = reassembled, 0.0
    if gcfg.shift is not None:
        final, shift = rd.make_nonnegative(reassembled, gcfg.shift)
    sub = concentration_signal(m, gcfg.subordinate)
    c_new = GoalSignal("concentration", final + sub.values, before.parameter_order,
                       denominators=before.denominators)
    target = concentration_to_quantity(c_new, total)
    return final, shift, target


def run_pipeline(config: PipelineConfig) -> PipelineResult:
    """Load the input table and process every group in declared order."""
    input_path = config.input if config.input.is_absolute() else config.base_dir / config.input
    try:
        m = load_microfile(input_path, config.schema, config.identifiers)
    except GroupAnonError as exc:
        raise StageError("load", "-", str(exc)) from exc

    results = []
    for index, gcfg in enumerate(config.groups):
        rng = np.random.default_rng([config.seed, index])
        m, result = run_group(m, gcfg, rng)
        results.append(result)
    return PipelineResult(microfile=m, groups=results, seed=config.seed)


def _signal_rows(signal_values, order):
    return [(value, float(v)) for value, v in zip(order, signal_values)]


def write_signal_csv(path, order, values) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["parameter_value", "value"])
        for value, v in _signal_rows(values, order):
            writer.writerow([value, f"{v:.12g}"])


def write_outputs(config: PipelineConfig, result: PipelineResult) -> None:
    """Write the modified table, per-group artifacts and the JSON report."""
    base = config.base_dir
    output = config.output if config.output.is_absolute() else base / config.output
    report_dir = config.report_dir if config.report_dir.is_absolute() else base / config.report_dir
    report_dir.mkdir(parents=True, exist_ok=True)
    output.parent.mkdir(parents=True, exist_ok=True)

    write_microfile(result.microfile, output)

    report = {"seed": result.seed, "output": str(output), "groups": []}
    for g in result.groups:
        order = g.before.parameter_order
        write_signal_csv(report_dir / f"{g.name}_signal_before.csv", order, g.before.values)
        write_signal_csv(report_dir / f"{g.name}_signal_after.csv", order, g.after.values)
        svg_line_chart(order, g.before.values, report_dir / f"{g.name}_before.svg",
                       title=f"{g.name}: goal signal (before)")
        svg_line_chart(order, g.after.values, report_dir / f"{g.name}_after.svg",
                       title=f"{g.name}: goal signal (after)")
        _write_plan_csv(report_dir / f"{g.name}_swaps.csv", g.plan)
        report["groups"].append(
            {
                "name": g.name,
                "signal_before": [float(v) for v in g.before.values],
                "signal_after": [float(v) for v in g.after.values],
                "coefficients": [float(v) for v in g.coefficients],
                "shift": g.shift,
                "swaps": len(g.plan),
                "total_swap_cost": g.plan.total_cost,
                "timings": {k: round(v, 6) for k, v in g.timings.items()},
                "warnings": g.warnings,
            }
        )
    (report_dir / "report.json").write_text(json.dumps(report, indent=2) + "\n")


def _write_plan_csv(path, plan: SwapPlan) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["member_index", "partner_index", "cost"])
        for (a, b), cost in zip(plan.swaps, plan.costs):
            writer.writerow([a, b, f"{cost:.12g}"])
