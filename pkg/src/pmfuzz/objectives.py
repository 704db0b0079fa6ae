"""Criterion models and the payoff matrix.

Three criteria are tracked for a project: total cost, completion time and
total quality loss. Each is expressed as a linear objective over the
schedule model (duration, start and finish variables), minimized to obtain
the per-criterion optimum, and the payoff matrix collects how each
optimizer scores under all three criteria. Column extremes of that matrix
give the per-criterion value ranges used to calibrate satisfaction curves.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from .errors import PmfuzzError
from .lp_core import (
    Constraint,
    LinearModel,
    ModelBuilder,
    Objective,
    SolveOutcome,
    Status,
    solve_lp,
    solve_milp,
    with_extra_rows,
)
from .project_model import (
    ProjectNetwork,
    cost_slopes,
    earliest_start_schedule,
    total_cost,
    total_quality_loss,
)


class CriterionId(Enum):
    COST = "cost"
    TIME = "time"
    QUALITY_LOSS = "quality_loss"


# Canonical reporting order everywhere: cost, time, quality loss.
CANONICAL_ORDER: tuple[CriterionId, ...] = (
    CriterionId.COST, CriterionId.TIME, CriterionId.QUALITY_LOSS)

# Tie-resolution order when cleaning up a criterion optimum: cost first,
# then quality loss; time runs last because its stage optimizes a proxy.
_POLISH_ORDER: tuple[CriterionId, ...] = (
    CriterionId.COST, CriterionId.QUALITY_LOSS, CriterionId.TIME)


@dataclass(frozen=True)
class PayoffMatrix:
    """Per-criterion optimizers, their cross-evaluations and value ranges.

    solutions: duration vector that optimizes each criterion.
    entries: entries[row][col] = value of criterion col at solutions[row].
    lower/upper: column minimum/maximum per criterion.
    """
    solutions: dict[CriterionId, dict[str, float]]
    entries: dict[CriterionId, dict[CriterionId, float]]
    lower: dict[CriterionId, float]
    upper: dict[CriterionId, float]

    def bounds(self) -> dict[CriterionId, tuple[float, float]]:
        return {c: (self.lower[c], self.upper[c]) for c in CANONICAL_ORDER}


def duration_var(activity_id: str) -> str:
    return f"dur_{activity_id}"


def start_var(activity_id: str) -> str:
    return f"start_{activity_id}"


FINISH_VAR = "finish"


def build_schedule_model(network: ProjectNetwork, *, integer_mode: bool = True) -> LinearModel:
    """Assemble the shared scheduling skeleton with no objective.

    Variables: one duration per activity bounded by [crash, normal]
    (integer when integer_mode), one nonnegative start per activity, and a
    finish variable. Rows: start_i + dur_i <= start_j per precedence edge
    and start_s + dur_s <= finish for every sink, so finish upper-bounds
    the true makespan of any feasible assignment.
    """
    b = ModelBuilder()
    for aid in network.topo_order:
        a = network.activity(aid)
        b.add_variable(duration_var(aid), float(a.crash_time), float(a.normal_time),
                       integer=integer_mode)
    for aid in network.topo_order:
        b.add_variable(start_var(aid), 0.0)
    b.add_variable(FINISH_VAR, 0.0)
    for aid in network.topo_order:
        for pred in network.activity(aid).predecessors:
            b.add_constraint({start_var(pred): 1.0, duration_var(pred): 1.0,
                              start_var(aid): -1.0}, "<=", 0.0)
    for aid in network.sinks:
        b.add_constraint({start_var(aid): 1.0, duration_var(aid): 1.0,
                          FINISH_VAR: -1.0}, "<=", 0.0)
    return b.build()


def criterion_coeffs(network: ProjectNetwork, criterion: CriterionId,
                     coefficient_set: str = "table1") -> tuple[dict[str, float], float]:
    """Linear form of a criterion over model variables: (coeffs, constant).

    Cost and quality loss both decrease as durations grow, so they carry
    negative duration coefficients plus the all-normal constant; time is
    simply the finish variable.
    """
    if criterion is CriterionId.TIME:
        return {FINISH_VAR: 1.0}, 0.0
    if criterion is CriterionId.COST:
        slopes = cost_slopes(network, coefficient_set)
        coeffs = {duration_var(a.id): -slopes[a.id]
                  for a in network.activities if slopes[a.id] != 0.0}
        constant = sum(a.normal_cost + slopes[a.id] * a.normal_time
                       for a in network.activities)
        return coeffs, constant
    coeffs = {duration_var(a.id): -a.quality_slope
              for a in network.activities if a.quality_slope != 0.0}
    constant = sum(a.quality_slope * a.normal_time for a in network.activities)
    return coeffs, constant


def _name_index(model: LinearModel) -> dict[str, int]:
    return {v.name: i for i, v in enumerate(model.variables)}


def attach_objective(model: LinearModel, coeffs: Mapping[str, float], constant: float,
                     sense: str) -> LinearModel:
    index = _name_index(model)
    indexed = {index[name]: c for name, c in coeffs.items()}
    return with_extra_rows(model, (), Objective(indexed, sense, constant))


def criterion_cap_row(model: LinearModel, coeffs: Mapping[str, float], constant: float,
                      relation: str, bound: float) -> Constraint:
    """Row pinning a criterion's linear form: sum(coeffs) (relation) bound - constant."""
    index = _name_index(model)
    indexed = {index[name]: c for name, c in coeffs.items()}
    return Constraint(indexed, relation, bound - constant)


def build_min_time_model(network: ProjectNetwork, *, integer_mode: bool = True) -> LinearModel:
    base = build_schedule_model(network, integer_mode=integer_mode)
    return attach_objective(base, *criterion_coeffs(network, CriterionId.TIME), "min")


def build_min_cost_model(network: ProjectNetwork, coefficient_set: str = "table1", *,
                         integer_mode: bool = True) -> LinearModel:
    base = build_schedule_model(network, integer_mode=integer_mode)
    coeffs, constant = criterion_coeffs(network, CriterionId.COST, coefficient_set)
    return attach_objective(base, coeffs, constant, "min")


def build_min_quality_loss_model(network: ProjectNetwork, *,
                                 integer_mode: bool = True) -> LinearModel:
    base = build_schedule_model(network, integer_mode=integer_mode)
    return attach_objective(base, *criterion_coeffs(network, CriterionId.QUALITY_LOSS), "min")


def durations_from_assignment(network: ProjectNetwork,
                              assignment: Mapping[str, float]) -> dict[str, float]:
    return {aid: assignment[duration_var(aid)] for aid in network.ids}


def evaluate_criterion(network: ProjectNetwork, durations: Mapping[str, float],
                       criterion: CriterionId, coefficient_set: str = "table1") -> float:
    """Scalar criterion value recomputed directly from durations.

    Every reported number flows through here so that solver and oracle
    agree bit for bit whenever their duration vectors agree.
    """
    if criterion is CriterionId.COST:
        return total_cost(network, durations, coefficient_set)
    if criterion is CriterionId.TIME:
        return earliest_start_schedule(network, durations).makespan
    return total_quality_loss(network, durations)


def _cap_tol(value: float) -> float:
    return 1e-7 * max(1.0, abs(value))


def _solve(model: LinearModel, integer_mode: bool) -> SolveOutcome:
    out = solve_milp(model) if integer_mode else solve_lp(model)
    if out.status is not Status.OPTIMAL:
        raise PmfuzzError(f"criterion model unexpectedly {out.status.value}")
    return out


def payoff_matrix(network: ProjectNetwork, coefficient_set: str = "table1", *,
                  integer_mode: bool = True) -> PayoffMatrix:
    """Optimize each criterion, resolve ties deterministically, cross-evaluate.

    Criterion optima usually admit many alternate schedules, and the value
    ranges depend on which one is reported. After minimizing a criterion
    its value is pinned and the remaining criteria are pushed to their
    worst (largest) values in a fixed order, so the ranges describe the
    full spread between best and worst outcomes among the three
    optimizers. The time stage maximizes total duration as a linear proxy
    (the true makespan is a maximum over paths, which no linear objective
    expresses); entries are re-evaluated from final durations either way.
    """
    base = build_schedule_model(network, integer_mode=integer_mode)
    forms = {c: criterion_coeffs(network, c, coefficient_set) for c in CANONICAL_ORDER}
    total_duration = {duration_var(a.id): 1.0 for a in network.activities}

    solutions: dict[CriterionId, dict[str, float]] = {}
    entries: dict[CriterionId, dict[CriterionId, float]] = {}
    for k in CANONICAL_ORDER:
        coeffs_k, const_k = forms[k]
        out = _solve(attach_objective(base, coeffs_k, const_k, "min"), integer_mode)
        durations = durations_from_assignment(network, out.assignment)
        best = evaluate_criterion(network, durations, k, coefficient_set)
        caps = [criterion_cap_row(base, coeffs_k, const_k, "<=", best + _cap_tol(best))]
        for c in _POLISH_ORDER:
            if c is k:
                continue
            if c is CriterionId.TIME:
                stage_coeffs, stage_const = total_duration, 0.0
            else:
                stage_coeffs, stage_const = forms[c]
            stage = attach_objective(with_extra_rows(base, tuple(caps)),
                                     stage_coeffs, stage_const, "max")
            out = _solve(stage, integer_mode)
            durations = durations_from_assignment(network, out.assignment)
            if c is not CriterionId.TIME:
                achieved = evaluate_criterion(network, durations, c, coefficient_set)
                caps.append(criterion_cap_row(base, *forms[c], ">=",
                                              achieved - _cap_tol(achieved)))
        solutions[k] = durations
        entries[k] = {c: evaluate_criterion(network, durations, c, coefficient_set)
                      for c in CANONICAL_ORDER}
    lower = {c: min(entries[r][c] for r in CANONICAL_ORDER) for c in CANONICAL_ORDER}
    upper = {c: max(entries[r][c] for r in CANONICAL_ORDER) for c in CANONICAL_ORDER}
    return PayoffMatrix(solutions, entries, lower, upper)
