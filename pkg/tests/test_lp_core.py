"""Solver engine tests: simplex, branch and bound, determinism."""

from __future__ import annotations

import itertools
import math
import random

import pytest

from pmfuzz.errors import ModelMalformed
from pmfuzz.lp_core import (
    Constraint,
    LinearModel,
    ModelBuilder,
    Objective,
    Status,
    Variable,
    assignment_satisfies,
    check_feasible,
    solve_lp,
    solve_milp,
    validate_model,
    variable_index,
    with_extra_rows,
)


def model(variables, constraints, objective=None):
    return LinearModel(tuple(variables), tuple(constraints), objective)


# ------------------------------------------------------------- validation

def test_duplicate_variable_names_rejected():
    with pytest.raises(ModelMalformed, match="duplicate"):
        validate_model(model([Variable("x"), Variable("x")], []))


def test_reversed_bounds_rejected():
    with pytest.raises(ModelMalformed, match="reversed"):
        validate_model(model([Variable("x", lower=5.0, upper=1.0)], []))


def test_bad_relation_rejected():
    with pytest.raises(ModelMalformed, match="relation"):
        validate_model(model([Variable("x")], [Constraint({0: 1.0}, "<", 1.0)]))


def test_unknown_variable_index_rejected():
    with pytest.raises(ModelMalformed, match="unknown variable index"):
        validate_model(model([Variable("x")], [Constraint({3: 1.0}, "<=", 1.0)]))


def test_nonfinite_coefficient_rejected():
    with pytest.raises(ModelMalformed):
        validate_model(model([Variable("x")], [Constraint({0: math.inf}, "<=", 1.0)]))
    with pytest.raises(ModelMalformed):
        validate_model(model([Variable("x")], [Constraint({0: 1.0}, "<=", math.nan)]))


def test_bad_objective_sense_rejected():
    with pytest.raises(ModelMalformed, match="sense"):
        validate_model(model([Variable("x")], [], Objective({0: 1.0}, "argmin")))


# ------------------------------------------------------------------ LP

def test_min_with_unique_vertex():
    m = model([Variable("x"), Variable("y")],
              [Constraint({0: 1.0, 1: 1.0}, ">=", 3.0)],
              Objective({0: 2.0, 1: 1.0}, "min"))
    out = solve_lp(m)
    assert out.status is Status.OPTIMAL
    assert out.objective == pytest.approx(3.0, abs=1e-9)
    assert out.assignment["x"] == pytest.approx(0.0, abs=1e-9)
    assert out.assignment["y"] == pytest.approx(3.0, abs=1e-9)


def test_max_sense_hits_upper_bound():
    m = model([Variable("x", upper=5.0)], [], Objective({0: 1.0}, "max"))
    out = solve_lp(m)
    assert out.status is Status.OPTIMAL
    assert out.objective == pytest.approx(5.0, abs=1e-9)


def test_unbounded_detected():
    m = model([Variable("x")], [], Objective({0: 1.0}, "max"))
    assert solve_lp(m).status is Status.UNBOUNDED


def test_infeasible_detected():
    m = model([Variable("x")],
              [Constraint({0: 1.0}, "<=", 1.0), Constraint({0: 1.0}, ">=", 2.0)],
              Objective({0: 1.0}, "min"))
    assert solve_lp(m).status is Status.INFEASIBLE


def test_equality_rows_pin_the_point():
    m = model([Variable("x"), Variable("y")],
              [Constraint({0: 1.0, 1: 1.0}, "=", 4.0),
               Constraint({0: 1.0, 1: -1.0}, "=", 2.0)],
              Objective({0: 1.0}, "min"))
    out = solve_lp(m)
    assert out.status is Status.OPTIMAL
    assert out.assignment["x"] == pytest.approx(3.0, abs=1e-9)
    assert out.assignment["y"] == pytest.approx(1.0, abs=1e-9)


def test_free_variable_split():
    m = model([Variable("x", lower=-math.inf, upper=math.inf)],
              [Constraint({0: 1.0}, ">=", -5.0)],
              Objective({0: 1.0}, "min"))
    out = solve_lp(m)
    assert out.status is Status.OPTIMAL
    assert out.objective == pytest.approx(-5.0, abs=1e-9)


def test_upper_bound_only_variable():
    m = model([Variable("x", lower=-math.inf, upper=3.0)], [],
              Objective({0: 1.0}, "max"))
    out = solve_lp(m)
    assert out.objective == pytest.approx(3.0, abs=1e-9)


def test_fixed_variable_folds_into_rhs():
    m = model([Variable("x", lower=2.0, upper=2.0), Variable("y")],
              [Constraint({0: 1.0, 1: 1.0}, "<=", 5.0)],
              Objective({1: 1.0}, "max"))
    out = solve_lp(m)
    assert out.assignment["x"] == pytest.approx(2.0)
    assert out.assignment["y"] == pytest.approx(3.0, abs=1e-9)


def test_objective_constant_is_reported():
    m = model([Variable("x")], [Constraint({0: 1.0}, ">=", 2.0)],
              Objective({0: 1.0}, "min", constant=10.0))
    assert solve_lp(m).objective == pytest.approx(12.0, abs=1e-9)


def test_badly_scaled_rows_are_handled():
    # Same geometry as the unique-vertex test, coefficients blown up 1e8.
    m = model([Variable("x"), Variable("y")],
              [Constraint({0: 1e8, 1: 1e8}, ">=", 3e8)],
              Objective({0: 2.0, 1: 1.0}, "min"))
    out = solve_lp(m)
    assert out.status is Status.OPTIMAL
    assert out.objective == pytest.approx(3.0, rel=1e-9)


def test_zero_row_consistency_checked():
    fixed = [Variable("x", lower=1.0, upper=1.0)]
    ok = model(fixed, [Constraint({0: 2.0}, "<=", 2.0)], Objective({0: 1.0}, "min"))
    assert solve_lp(ok).status is Status.OPTIMAL
    bad = model(fixed, [Constraint({0: 2.0}, "<=", 1.0)], Objective({0: 1.0}, "min"))
    assert solve_lp(bad).status is Status.INFEASIBLE


def test_beale_degenerate_problem_terminates_at_optimum():
    # Classic cycling-prone instance; optimum -0.05 at x=(1/25, 0, 1, 0).
    m = model(
        [Variable("x1"), Variable("x2"), Variable("x3"), Variable("x4")],
        [Constraint({0: 0.25, 1: -60.0, 2: -1.0 / 25.0, 3: 9.0}, "<=", 0.0),
         Constraint({0: 0.5, 1: -90.0, 2: -1.0 / 50.0, 3: 3.0}, "<=", 0.0),
         Constraint({2: 1.0}, "<=", 1.0)],
        Objective({0: -0.75, 1: 150.0, 2: -0.02, 3: 6.0}, "min"))
    out = solve_lp(m)
    assert out.status is Status.OPTIMAL
    assert out.objective == pytest.approx(-0.05, abs=1e-9)


def test_precedence_chain_schedules_tightly():
    # start_b >= start_a + dur_a; finish >= start_b + dur_b; minimize finish.
    b = ModelBuilder()
    b.add_variable("start_a", 0.0)
    b.add_variable("dur_a", 3.0, 7.0)
    b.add_variable("start_b", 0.0)
    b.add_variable("dur_b", 2.0, 4.0)
    b.add_variable("finish", 0.0)
    b.add_constraint({"start_b": 1.0, "start_a": -1.0, "dur_a": -1.0}, ">=", 0.0)
    b.add_constraint({"finish": 1.0, "start_b": -1.0, "dur_b": -1.0}, ">=", 0.0)
    b.set_objective({"finish": 1.0}, "min")
    out = solve_lp(b.build())
    assert out.objective == pytest.approx(5.0, abs=1e-9)


# ------------------------------------------------------------------ MILP

def test_branch_and_bound_beats_rounding():
    m = model([Variable("x", 0.0, 10.0, integer=True),
               Variable("y", 0.0, 10.0, integer=True)],
              [Constraint({0: 6.0, 1: 4.0}, "<=", 10.0)],
              Objective({0: 5.0, 1: 4.0}, "max"))
    relaxed = solve_lp(m)
    out = solve_milp(m)
    assert out.status is Status.OPTIMAL
    assert out.objective == pytest.approx(9.0, abs=1e-9)
    assert out.assignment == {"x": 1.0, "y": 1.0}
    assert relaxed.objective >= out.objective - 1e-9
    assert out.nodes >= 1


def test_integer_values_are_snapped_exact():
    m = model([Variable("x", 0.0, 9.0, integer=True)],
              [Constraint({0: 3.0}, "<=", 10.0)],
              Objective({0: 1.0}, "max"))
    out = solve_milp(m)
    assert out.assignment["x"] == 3.0
    assert out.assignment["x"] == int(out.assignment["x"])


def test_lp_feasible_but_integer_infeasible():
    m = model([Variable("x", 0.0, 5.0, integer=True)],
              [Constraint({0: 2.0}, "=", 3.0)],
              Objective({0: 1.0}, "min"))
    assert solve_lp(m).status is Status.OPTIMAL
    assert solve_milp(m).status is Status.INFEASIBLE


def test_empty_integer_box_short_circuits():
    m = model([Variable("x", 0.4, 0.6, integer=True)], [],
              Objective({0: 1.0}, "min"))
    out = solve_milp(m)
    assert out.status is Status.INFEASIBLE
    assert out.nodes == 0


def test_knife_edge_snap_rejection_still_terminates():
    # The row's only solution is x = 2 + 5e-9: close enough to 2 that the
    # node looks integral, yet snapping leaves a raw violation of 5 against
    # a row tolerance of 1. The rejected point must not stall the partition;
    # the verdict is infeasible because no true integer solution exists.
    m = model([Variable("x", 0.0, 5.0, integer=True)],
              [Constraint({0: 1e9}, "=", 2e9 + 5.0)])
    out = solve_milp(m)
    assert out.status is Status.INFEASIBLE
    assert out.nodes <= 16


def test_check_feasible_returns_witness():
    m = model([Variable("x", 0.0, 5.0, integer=True), Variable("y", 0.0, 5.0)],
              [Constraint({0: 1.0, 1: 1.0}, ">=", 4.5),
               Constraint({0: 1.0}, "<=", 3.0)])
    out = check_feasible(m)
    assert out.status is Status.OPTIMAL
    assert assignment_satisfies(m, out.assignment, check_integrality=True)


def test_check_feasible_ignores_any_objective():
    m = model([Variable("x", 0.0, 5.0, integer=True)],
              [Constraint({0: 1.0}, ">=", 2.0)],
              Objective({0: 1.0}, "max"))
    out = check_feasible(m)
    assert out.status is Status.OPTIMAL
    assert out.objective == 0.0


def test_milp_without_integer_vars_is_plain_lp():
    m = model([Variable("x", 0.0, 4.0)], [], Objective({0: 1.0}, "max"))
    out = solve_milp(m)
    assert out.objective == pytest.approx(4.0)
    assert out.nodes == 0


def test_repeated_solves_are_identical():
    m = model([Variable("x", 0.0, 3.0, integer=True),
               Variable("y", 0.0, 3.0, integer=True)],
              [Constraint({0: 1.0, 1: 1.0}, "<=", 3.0)],
              Objective({0: 1.0, 1: 1.0}, "max"))
    runs = [solve_milp(m) for _ in range(3)]
    assert runs[0].assignment == runs[1].assignment == runs[2].assignment
    assert runs[0].nodes == runs[1].nodes == runs[2].nodes


def _brute_force_min(variables, constraints, objective):
    """Integer-grid exhaustion used as the independent reference."""
    spans = [range(int(v.lower), int(v.upper) + 1) for v in variables]
    best = None
    for point in itertools.product(*spans):
        ok = True
        for row in constraints:
            lhs = sum(c * point[i] for i, c in row.coeffs.items())
            if row.relation == "<=" and lhs > row.rhs + 1e-9:
                ok = False
            elif row.relation == ">=" and lhs < row.rhs - 1e-9:
                ok = False
            elif row.relation == "=" and abs(lhs - row.rhs) > 1e-9:
                ok = False
            if not ok:
                break
        if not ok:
            continue
        value = sum(c * point[i] for i, c in objective.coeffs.items())
        if best is None or value < best - 1e-12:
            best = value
    return best


@pytest.mark.parametrize("seed", range(25))
def test_random_integer_programs_match_exhaustion(seed):
    rng = random.Random(1000 + seed)
    n = rng.randint(2, 4)
    variables = [Variable(f"v{i}", 0.0, float(rng.randint(2, 4)), integer=True)
                 for i in range(n)]
    constraints = []
    for _ in range(rng.randint(1, 3)):
        coeffs = {i: float(rng.randint(-3, 3)) for i in range(n)}
        coeffs = {i: c for i, c in coeffs.items() if c != 0.0}
        if not coeffs:
            continue
        relation = rng.choice(["<=", ">="])
        rhs = float(rng.randint(-4, 8))
        constraints.append(Constraint(coeffs, relation, rhs))
    objective = Objective({i: float(rng.randint(-5, 5)) for i in range(n)}, "min")
    m = model(variables, constraints, objective)

    expected = _brute_force_min(variables, constraints, objective)
    out = solve_milp(m)
    if expected is None:
        assert out.status is Status.INFEASIBLE
    else:
        assert out.status is Status.OPTIMAL
        assert out.objective == pytest.approx(expected, abs=1e-7)
        assert assignment_satisfies(m, out.assignment, check_integrality=True)
        relaxed = solve_lp(m)
        assert relaxed.objective <= out.objective + 1e-7


# ------------------------------------------------------------- helpers

def test_assignment_satisfies_scales_row_tolerance():
    m = model([Variable("x")], [Constraint({0: 1e6}, "<=", 1e6)], None)
    assert assignment_satisfies(m, {"x": 1.0 + 1e-12})
    assert not assignment_satisfies(m, {"x": 1.1})
    assert not assignment_satisfies(m, {"y": 1.0})


def test_assignment_satisfies_integrality_flag():
    m = model([Variable("x", 0.0, 5.0, integer=True)], [], None)
    assert assignment_satisfies(m, {"x": 2.5})
    assert not assignment_satisfies(m, {"x": 2.5}, check_integrality=True)


def test_with_extra_rows_and_variable_index():
    base = model([Variable("x", 0.0, 5.0)], [], Objective({0: 1.0}, "max"))
    tightened = with_extra_rows(base, [Constraint({0: 1.0}, "<=", 2.0)])
    assert solve_lp(base).objective == pytest.approx(5.0)
    assert solve_lp(tightened).objective == pytest.approx(2.0)
    flipped = with_extra_rows(base, [], Objective({0: 1.0}, "min"))
    assert solve_lp(flipped).objective == pytest.approx(0.0)
    assert variable_index(base, "x") == 0
    with pytest.raises(KeyError):
        variable_index(base, "zz")


def test_builder_rejects_duplicates_and_resolves_names():
    b = ModelBuilder()
    b.add_variable("a", 0.0, 1.0)
    with pytest.raises(ModelMalformed):
        b.add_variable("a")
    assert b.index("a") == 0
