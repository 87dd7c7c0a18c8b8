import numpy as np
import pytest
from hypothesis import given, strategies as st

from groupanon import reference as ref
from groupanon.errors import ConstraintError, InfeasibleError, UnboundedError
from groupanon.redistribute import (
    ConstraintRow,
    ConstraintSpec,
    Objective,
    build_constraints,
    check_solution,
    make_nonnegative,
    mean_fix,
    normalize_mean_std,
    reassemble,
    redistribute_signal,
    round_to_integers,
    satisfies,
    solve_constraints,
)
from groupanon.wavelet import FILTERS, decompose

DB2 = FILTERS["db2"]


@pytest.fixture(scope="module")
def quantity_dec():
    return decompose(ref.QUANTITY, DB2, 2)


@pytest.fixture(scope="module")
def concentration_dec():
    return decompose(ref.CONCENTRATION, DB2, 2)


def spec_from(system, bounds="printed"):
    rows = tuple(
        ConstraintRow(p, rel, b if bounds == "printed" else "original")
        for p, rel, b, _ in system
    )
    return ConstraintSpec(rows=rows)


class TestBuildConstraints:
    def test_quantity_system_coefficients(self, quantity_dec):
        lp = build_constraints(quantity_dec, spec_from(ref.QUANTITY_SYSTEM))
        for (coeffs, rel, bound), (_, rel_ref, b_ref, printed) in zip(lp.rows, ref.QUANTITY_SYSTEM):
            assert rel == rel_ref and bound == pytest.approx(b_ref)
            assert np.max(np.abs(coeffs - np.array(printed))) < 1e-3

    def test_concentration_system_coefficients(self, concentration_dec):
        lp = build_constraints(concentration_dec, spec_from(ref.CONCENTRATION_SYSTEM))
        for (coeffs, _, _), (_, _, _, printed) in zip(lp.rows, ref.CONCENTRATION_SYSTEM):
            assert np.max(np.abs(coeffs - np.array(printed))) < 1e-3

    def test_original_bounds_make_coefficients_feasible(self, quantity_dec):
        rows = tuple(ConstraintRow(i, "<=", "original") for i in range(1, 17))
        lp = build_constraints(quantity_dec, ConstraintSpec(rows=rows))
        assert satisfies(lp, quantity_dec.approx, tol=1e-9)

    def test_position_out_of_range(self, quantity_dec):
        with pytest.raises(ConstraintError, match="17"):
            build_constraints(quantity_dec, ConstraintSpec((ConstraintRow(17, "<="),)))

    def test_relation_validated(self):
        with pytest.raises(ConstraintError, match="relation"):
            ConstraintRow(1, "==")

    def test_spec_needs_rows(self):
        with pytest.raises(ConstraintError, match="at least one"):
            ConstraintSpec(rows=())


class TestSolve:
    def test_consistent_solution_satisfies_quantity_system(self, quantity_dec):
        lp = build_constraints(quantity_dec, spec_from(ref.QUANTITY_SYSTEM))
        assert satisfies(lp, ref.QUANTITY_SOLUTION)

    def test_raw_quantity_solution_is_inconsistent(self, quantity_dec):
        # the raw bundled vector (corrupted third coefficient) fails exactly one
        # row, the position-15 cap, by under 1e-3; the verifier must flag it
        lp = build_constraints(quantity_dec, spec_from(ref.QUANTITY_SYSTEM))
        checks = check_solution(lp, ref.QUANTITY_SOLUTION_RAW)
        bad = [c for c in checks if not c.satisfied]
        assert len(bad) == 1
        assert "0.404" in bad[0].position_text
        assert 0 < bad[0].violation < 1e-3

    def test_concentration_solution_known_violation(self, concentration_dec):
        # the bundled concentration solution genuinely violates the position-5
        # row of its own system; assert the verifier reports exactly that
        lp = build_constraints(concentration_dec, spec_from(ref.CONCENTRATION_SYSTEM))
        checks = check_solution(lp, ref.CONCENTRATION_SOLUTION)
        bad = [c for c in checks if not c.satisfied]
        assert len(bad) == 1
        expected = ref.CONCENTRATION_KNOWN_VIOLATION
        assert bad[0].violation == pytest.approx(expected["violation"], abs=2e-4)
        assert checks.index(bad[0]) == 4  # fifth row of the declared system

    def test_feasibility_warm_start_returns_original(self, quantity_dec):
        rows = tuple(ConstraintRow(i, "<=", "original") for i in range(1, 17))
        lp = build_constraints(quantity_dec, ConstraintSpec(rows=rows))
        out = solve_constraints(lp, warm_start=quantity_dec.approx)
        assert np.array_equal(out, quantity_dec.approx)

    def test_solver_output_satisfies_all_bounds(self, quantity_dec):
        lp = build_constraints(quantity_dec, spec_from(ref.QUANTITY_SYSTEM))
        out = solve_constraints(lp)
        assert satisfies(lp, out, tol=1e-6)
        for (coeffs, relation, bound) in lp.rows:
            lhs = float(coeffs @ out)
            assert lhs <= bound + 1e-6 if relation == "<=" else lhs >= bound - 1e-6

    def test_maximize_objective_moves_mass(self, quantity_dec):
        spec = ConstraintSpec(
            rows=tuple(ConstraintRow(i, "<=", "original") for i in (1, 2, 15, 16)),
            objective=Objective("maximize", (8, 9)),
        )
        lp = build_constraints(quantity_dec, spec)
        out = solve_constraints(lp)
        rebuilt = reassemble(quantity_dec, out)
        baseline = reassemble(quantity_dec, quantity_dec.approx)
        assert rebuilt[7] + rebuilt[8] > baseline[7] + baseline[8]

    def test_contradictory_rows_infeasible_with_conflict(self, quantity_dec):
        spec = ConstraintSpec(
            rows=(ConstraintRow(1, "<=", 0.0), ConstraintRow(1, ">=", 1.0))
        )
        lp = build_constraints(quantity_dec, spec)
        with pytest.raises(InfeasibleError) as err:
            solve_constraints(lp)
        assert len(err.value.conflict) == 2

    def test_unbounded_objective_detected(self, quantity_dec):
        spec = ConstraintSpec(
            rows=(ConstraintRow(1, ">=", 0.0),),
            objective=Objective("maximize", (1,)),
        )
        lp = build_constraints(quantity_dec, spec)
        with pytest.raises(UnboundedError):
            solve_constraints(lp)


class TestReassemble:
    def test_reference_reassembly(self, quantity_dec):
        qhat = reassemble(quantity_dec, ref.QUANTITY_SOLUTION)
        assert np.max(np.abs(qhat - ref.QUANTITY_REASSEMBLED)) < 1e-2

    def test_identity_coefficients_reproduce_signal(self, quantity_dec):
        assert np.max(np.abs(reassemble(quantity_dec, quantity_dec.approx) - ref.QUANTITY)) < 1e-9

    def test_reference_concentration_reassembly(self, concentration_dec):
        chat = reassemble(concentration_dec, ref.CONCENTRATION_SOLUTION)
        assert np.max(np.abs(chat - ref.CONCENTRATION_REASSEMBLED)) < 1e-2

    def test_details_survive_reassembly(self, quantity_dec):
        rng = np.random.default_rng(41)
        for _ in range(20):
            coeffs = rng.normal(scale=1000, size=4)
            redone = decompose(reassemble(quantity_dec, coeffs), DB2, 2)
            for j in (1, 2):
                assert np.max(np.abs(redone.details[j] - quantity_dec.details[j])) < 1e-6

    def test_wrong_length_rejected(self, quantity_dec):
        with pytest.raises(ConstraintError, match="coefficients"):
            reassemble(quantity_dec, np.zeros(5))


class TestRepairs:
    def test_reference_shift_keeps_signal_nonnegative(self, quantity_dec):
        qhat = reassemble(quantity_dec, ref.QUANTITY_SOLUTION)
        shifted, shift = make_nonnegative(qhat, ref.QUANTITY_SHIFT)
        assert shift == 2150.0
        assert shifted.min() == pytest.approx(49.076, abs=1e-2)

    def test_reference_concentration_shift(self, concentration_dec):
        chat = reassemble(concentration_dec, ref.CONCENTRATION_SOLUTION)
        shifted, _ = make_nonnegative(chat, ref.CONCENTRATION_SHIFT)
        assert np.max(np.abs(shifted - ref.CONCENTRATION_SHIFTED)) < 1e-3

    def test_nonnegative_input_untouched(self):
        x = np.array([0.0, 1.0, 2.0])
        out, shift = make_nonnegative(x)
        assert shift == 0.0
        assert np.array_equal(out, x)

    def test_auto_shift_is_ceiling_plus_margin(self):
        out, shift = make_nonnegative(np.array([-2.4, 1.0]), margin=3.0)
        assert shift == 6.0
        assert out.min() >= 0

    def test_mean_fix_reference_pipeline(self, quantity_dec):
        qhat = reassemble(quantity_dec, ref.QUANTITY_SOLUTION)
        shifted, _ = make_nonnegative(qhat, 2150.0)
        fixed = mean_fix(shifted, ref.QUANTITY)
        assert fixed.sum() == pytest.approx(6272, abs=1e-9)
        final = round_to_integers(fixed, 6272)
        assert np.array_equal(final, ref.QUANTITY_FINAL)

    def test_mean_fix_identity_when_sums_match(self):
        x = np.array([1.0, 2.0, 3.0])
        assert np.max(np.abs(mean_fix(x, np.array([2.0, 2.0, 2.0])) - x)) < 1e-12

    def test_mean_fix_halves_doubled_signal(self):
        reference = np.array([5.0, 7.0, 11.0])
        assert np.allclose(mean_fix(2 * reference, reference), reference)

    def test_mean_fix_zero_sum_rejected(self):
        with pytest.raises(ConstraintError, match="zero-sum"):
            mean_fix(np.array([1.0, -1.0]), np.ones(2))


class TestRedistributeSignal:
    def test_one_call_quantity_chain(self, quantity_dec):
        result = redistribute_signal(
            quantity_dec,
            spec_from(ref.QUANTITY_SYSTEM),
            solution=ref.QUANTITY_SOLUTION,
            shift=2150.0,
            repair="mean_fix",
            reference=ref.QUANTITY,
        )
        assert result.shift == 2150.0
        assert result.applied_repair == "mean_fix"
        assert np.max(np.abs(result.reassembled - ref.QUANTITY_REASSEMBLED)) < 1e-2
        assert result.final.sum() == pytest.approx(6272, abs=1e-9)
        assert np.array_equal(round_to_integers(result.final, 6272), ref.QUANTITY_FINAL)
        # reassembled equals matrix image plus details, and the details survive
        redone = decompose(result.reassembled, DB2, 2)
        for j in (1, 2):
            assert np.max(np.abs(redone.details[j] - quantity_dec.details[j])) < 1e-6

    def test_solver_route_with_auto_shift(self, quantity_dec):
        rows = tuple(ConstraintRow(i, "<=", "original") for i in range(1, 17))
        result = redistribute_signal(quantity_dec, ConstraintSpec(rows=rows))
        assert result.applied_repair == "none"
        assert result.shift == 0.0
        assert np.max(np.abs(result.final - ref.QUANTITY)) < 1e-9

    def test_repair_needs_reference(self, quantity_dec):
        with pytest.raises(ConstraintError, match="reference"):
            redistribute_signal(quantity_dec, spec_from(ref.QUANTITY_SYSTEM),
                                solution=ref.QUANTITY_SOLUTION, repair="mean_fix")

    def test_unknown_repair_rejected(self, quantity_dec):
        with pytest.raises(ConstraintError, match="repair"):
            redistribute_signal(quantity_dec, spec_from(ref.QUANTITY_SYSTEM), repair="median")


class TestNormalize:
    def test_identity(self):
        x = np.array([3.0, 1.0, 4.0, 1.0, 5.0])
        assert np.max(np.abs(normalize_mean_std(x, x) - x)) < 1e-12

    def test_affine_invariance(self):
        reference = np.array([3.0, 1.0, 4.0, 1.0, 5.0])
        mapped = 2.5 * reference + 17.0
        assert np.max(np.abs(normalize_mean_std(mapped, reference) - reference)) < 1e-9

    def test_reference_moments_reproduced(self):
        # direct-summation oracle for the reference mean/std
        q = ref.QUANTITY
        mean = sum(q) / len(q)
        std = (sum((v - mean) ** 2 for v in q) / (len(q) - 1)) ** 0.5
        assert mean == ref.QUANTITY_MEAN
        assert std == pytest.approx(ref.QUANTITY_STD, abs=1e-9)

        rng = np.random.default_rng(13)
        out = normalize_mean_std(rng.random(16), q)
        assert out.mean() == pytest.approx(ref.QUANTITY_MEAN, abs=1e-9)
        assert out.std(ddof=1) == pytest.approx(ref.QUANTITY_STD, abs=1e-9)

    def test_constant_input_rejected(self):
        with pytest.raises(ConstraintError, match="non-constant"):
            normalize_mean_std(np.ones(4), np.arange(4.0))


class TestRounding:
    def test_reference_total(self):
        assert int(ref.QUANTITY_FINAL.sum()) == 6272

    def test_integer_input_with_matching_total_unchanged(self):
        x = np.array([1.0, 2.0, 3.0])
        assert np.array_equal(round_to_integers(x, 6), [1, 2, 3])

    def test_half_half_tie_breaks_to_lower_index(self):
        assert np.array_equal(round_to_integers(np.array([0.5, 0.5]), 1), [1, 0])

    def test_negative_total_rejected(self):
        with pytest.raises(ConstraintError, match="non-negative"):
            round_to_integers(np.array([1.0]), -1)

    def test_negative_values_rejected(self):
        with pytest.raises(ConstraintError, match="non-negative"):
            round_to_integers(np.array([-0.5, 1.5]), 1)

    def test_unreachable_total_rejected(self):
        with pytest.raises(ConstraintError, match="unreachable"):
            round_to_integers(np.array([0.2, 0.3]), 5)

    @given(
        st.lists(st.floats(min_value=0, max_value=1000, allow_nan=False), min_size=1, max_size=40)
    )
    def test_sum_preserved_and_deviation_below_one(self, values):
        arr = np.array(values)
        total = int(round(arr.sum()))
        if not np.floor(arr).sum() <= total <= np.ceil(arr).sum():
            return
        out = round_to_integers(arr, total)
        assert out.sum() == total
        assert np.all(np.abs(out - arr) < 1.0)
