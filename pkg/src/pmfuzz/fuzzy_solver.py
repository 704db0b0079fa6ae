"""Max-λ solver: satisfaction-balanced scheduling over fuzzy criterion goals.

Each criterion gets a hyperbolic (tanh) satisfaction curve calibrated from
its value range, and the solver maximizes the smallest satisfaction degree
λ across criteria. Feasibility at a fixed λ is a MILP (each membership
constraint inverts to a linear cap on its criterion), and feasibility only
shrinks as λ grows, so bisection on λ converges. The answer is cleaned up
by a deterministic lexicographic pass (time, then cost, then quality loss)
because the optimal λ is typically attained by many schedules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

from .errors import (
    InfeasibleScenario,
    LambdaOutOfOpenInterval,
    PmfuzzError,
    ScenarioValidationError,
    UnknownActivityInScenario,
)
from .lp_core import (
    Constraint,
    LinearModel,
    Status,
    assignment_satisfies,
    check_feasible,
    solve_lp,
    solve_milp,
    with_extra_rows,
)
from .objectives import (
    CANONICAL_ORDER,
    FINISH_VAR,
    CriterionId,
    PayoffMatrix,
    attach_objective,
    build_schedule_model,
    criterion_cap_row,
    criterion_coeffs,
    duration_var,
    durations_from_assignment,
    evaluate_criterion,
    payoff_matrix,
)
from .project_model import ProjectNetwork, aggregate_quality, earliest_start_schedule

DEFAULT_LAMBDA_TOLERANCE = 1e-7

BoundsLike = Union["PayoffMatrix", Mapping[CriterionId, tuple[float, float]], None]


@dataclass(frozen=True)
class MembershipSpec:
    """Satisfaction curve parameters for one criterion.

    steepness = 6 / (upper - lower); at the interval edges the curve sits
    within (1 - tanh(3))/2 of 0 and 1. A degenerate spec (upper == lower)
    is a hard cap: satisfaction 1 at or below the bound, 0 above.
    """
    criterion: CriterionId
    lower: float
    upper: float
    steepness: float
    degenerate: bool


def membership_spec(criterion: CriterionId, lower: float, upper: float) -> MembershipSpec:
    if not (math.isfinite(lower) and math.isfinite(upper)):
        raise ScenarioValidationError(f"{criterion.value}: bounds must be finite")
    if upper < lower:
        raise ScenarioValidationError(
            f"{criterion.value}: bounds reversed [{lower}, {upper}]")
    if upper == lower:
        return MembershipSpec(criterion, lower, upper, 0.0, True)
    return MembershipSpec(criterion, lower, upper, 6.0 / (upper - lower), False)


def membership(spec: MembershipSpec, z: float) -> float:
    """Satisfaction degree of criterion value z under the smooth tanh curve."""
    if spec.degenerate:
        # Hard cap; the tolerance absorbs float dust from solver replay.
        return 1.0 if z <= spec.lower + 1e-9 * max(1.0, abs(spec.lower)) else 0.0
    mid = 0.5 * (spec.lower + spec.upper)
    return 0.5 * math.tanh(spec.steepness * (mid - z)) + 0.5


def invert_membership(spec: MembershipSpec, lam: float) -> float:
    """Largest criterion value whose satisfaction still reaches lam."""
    if spec.degenerate:
        raise PmfuzzError("degenerate membership curve has no inverse")
    if not 0.0 < lam < 1.0:
        raise LambdaOutOfOpenInterval(f"lambda must lie in (0, 1), got {lam}")
    mid = 0.5 * (spec.lower + spec.upper)
    return mid - math.atanh(2.0 * lam - 1.0) / spec.steepness


@dataclass(frozen=True)
class Scenario:
    """What-if constraints layered on top of a project network."""
    quality_floors: Mapping[str, float] = field(default_factory=dict)
    deadline: float | None = None
    budget_cap: float | None = None
    duration_locks: Mapping[str, float] = field(default_factory=dict)
    bound_overrides: Mapping[CriterionId, tuple[float, float]] | None = None
    integer_mode: bool = True
    lambda_tolerance: float = DEFAULT_LAMBDA_TOLERANCE


@dataclass(frozen=True)
class SolveStats:
    bisection_iterations: int
    milp_nodes: int


@dataclass(frozen=True)
class SolveResult:
    lambda_: float
    durations: dict[str, float]
    starts: dict[str, float]
    cost: float
    time: float
    quality_loss: float
    memberships: dict[CriterionId, float]
    aggregate_quality: float
    binding: tuple[CriterionId, ...]
    stats: SolveStats


def validate_scenario(network: ProjectNetwork, scenario: Scenario) -> None:
    """Reject scenarios that are malformed regardless of feasibility."""
    known = set(network.ids)
    for aid, floor in scenario.quality_floors.items():
        if aid not in known:
            raise UnknownActivityInScenario(f"quality floor on unknown activity {aid!r}")
        a = network.activity(aid)
        if not (a.crash_quality <= floor <= a.normal_quality):
            raise ScenarioValidationError(
                f"quality floor {floor} for {aid} outside its achievable range "
                f"[{a.crash_quality}, {a.normal_quality}]")
    for aid, locked in scenario.duration_locks.items():
        if aid not in known:
            raise UnknownActivityInScenario(f"duration lock on unknown activity {aid!r}")
        a = network.activity(aid)
        if not (a.crash_time <= locked <= a.normal_time):
            raise ScenarioValidationError(
                f"locked duration {locked} for {aid} outside [{a.crash_time}, "
                f"{a.normal_time}]")
        if scenario.integer_mode and abs(locked - round(locked)) > 1e-9:
            raise ScenarioValidationError(
                f"locked duration {locked} for {aid} must be whole in integer mode")
    if scenario.deadline is not None and not math.isfinite(scenario.deadline):
        raise ScenarioValidationError("deadline must be finite")
    if scenario.budget_cap is not None and not math.isfinite(scenario.budget_cap):
        raise ScenarioValidationError("budget cap must be finite")
    if not 0.0 < scenario.lambda_tolerance <= 0.5:
        raise ScenarioValidationError(
            f"lambda tolerance {scenario.lambda_tolerance} outside (0, 0.5]")
    if scenario.bound_overrides:
        for criterion, pair in scenario.bound_overrides.items():
            if not isinstance(criterion, CriterionId):
                raise ScenarioValidationError(f"bound override on unknown criterion "
                                              f"{criterion!r}")
            membership_spec(criterion, pair[0], pair[1])


def apply_scenario(model: LinearModel, network: ProjectNetwork, scenario: Scenario,
                   coefficient_set: str = "table1") -> LinearModel:
    """Append scenario rows: quality floors, deadline, budget cap, locks."""
    validate_scenario(network, scenario)
    rows: list[Constraint] = []
    for aid in network.topo_order:
        if aid not in scenario.quality_floors:
            continue
        a = network.activity(aid)
        slope = a.quality_slope
        if slope == 0.0:
            continue    # fixed-quality activity; floor already vacuous by validation
        # slope * (normal_time - T) <= normal_quality - floor
        rows.append(criterion_cap_row(
            model, {duration_var(aid): -slope}, slope * a.normal_time, "<=",
            a.normal_quality - scenario.quality_floors[aid]))
    if scenario.deadline is not None:
        rows.append(criterion_cap_row(model, {FINISH_VAR: 1.0}, 0.0, "<=",
                                      float(scenario.deadline)))
    if scenario.budget_cap is not None:
        coeffs, constant = criterion_coeffs(network, CriterionId.COST, coefficient_set)
        rows.append(criterion_cap_row(model, coeffs, constant, "<=",
                                      float(scenario.budget_cap)))
    for aid in network.topo_order:
        if aid in scenario.duration_locks:
            rows.append(criterion_cap_row(model, {duration_var(aid): 1.0}, 0.0, "=",
                                          float(scenario.duration_locks[aid])))
    return with_extra_rows(model, rows)


def resolve_bounds(network: ProjectNetwork, bounds: BoundsLike, scenario: Scenario,
                   coefficient_set: str = "table1") -> dict[CriterionId, tuple[float, float]]:
    """Criterion value ranges: payoff-derived unless explicitly supplied."""
    if bounds is None:
        bounds = payoff_matrix(network, coefficient_set,
                               integer_mode=scenario.integer_mode)
    if isinstance(bounds, PayoffMatrix):
        resolved = bounds.bounds()
    else:
        resolved = {c: (float(v[0]), float(v[1])) for c, v in bounds.items()}
    missing = [c for c in CANONICAL_ORDER if c not in resolved]
    if missing:
        raise ScenarioValidationError(
            f"bounds missing for {', '.join(c.value for c in missing)}")
    if scenario.bound_overrides:
        for criterion, pair in scenario.bound_overrides.items():
            resolved[criterion] = (float(pair[0]), float(pair[1]))
    return resolved


class _FeasibilityProbe:
    """Shared machinery for λ-feasibility checks with cheap pre-screens."""

    def __init__(self, network: ProjectNetwork, model: LinearModel, integer_mode: bool):
        self.network = network
        self.model = model
        self.integer_mode = integer_mode
        self.milp_nodes = 0

    def _candidate_from_relaxation(self, assignment: Mapping[str, float]) -> dict[str, float]:
        durations = {aid: float(round(assignment[duration_var(aid)]))
                     for aid in self.network.ids}
        schedule = earliest_start_schedule(self.network, durations)
        candidate = {duration_var(aid): durations[aid] for aid in self.network.ids}
        candidate.update({f"start_{aid}": schedule.starts[aid] for aid in self.network.ids})
        candidate[FINISH_VAR] = schedule.makespan
        return candidate

    def feasible(self, extra_rows: Sequence[Constraint]) -> bool:
        model = with_extra_rows(self.model, tuple(extra_rows))
        stripped = LinearModel(model.variables, model.constraints, None)
        relaxed = solve_lp(stripped)
        if relaxed.status is not Status.OPTIMAL:
            return False
        if not self.integer_mode:
            return True
        rounded = self._candidate_from_relaxation(relaxed.assignment)
        if assignment_satisfies(model, rounded, check_integrality=True):
            return True
        out = check_feasible(stripped)
        self.milp_nodes += out.nodes
        return out.status is Status.OPTIMAL

    def minimize(self, objective_coeffs: Mapping[str, float], constant: float,
                 extra_rows: Sequence[Constraint]) -> tuple[dict[str, float], float]:
        model = attach_objective(with_extra_rows(self.model, tuple(extra_rows)),
                                 objective_coeffs, constant, "min")
        out = solve_milp(model) if self.integer_mode else solve_lp(model)
        self.milp_nodes += out.nodes
        if out.status is not Status.OPTIMAL:
            raise PmfuzzError(f"cleanup stage unexpectedly {out.status.value}")
        return durations_from_assignment(self.network, out.assignment), out.objective


def _cap_tol(value: float) -> float:
    return 1e-7 * max(1.0, abs(value))


def solve_max_lambda(network: ProjectNetwork, bounds: BoundsLike = None,
                     scenario: Scenario | None = None, *,
                     coefficient_set: str = "table1") -> SolveResult:
    """Maximize the smallest criterion satisfaction over feasible schedules.

    Bisection on λ over MILP feasibility checks, then a lexicographic
    cleanup at the final λ (minimize time, then cost, then quality loss)
    so the returned schedule is deterministic. The reported λ is recomputed
    analytically from the final criterion values, so its precision is that
    of the membership curve, not of the bisection.
    """
    scenario = scenario or Scenario()
    validate_scenario(network, scenario)
    resolved = resolve_bounds(network, bounds, scenario, coefficient_set)
    specs = {c: membership_spec(c, *resolved[c]) for c in CANONICAL_ORDER}

    base = apply_scenario(build_schedule_model(network, integer_mode=scenario.integer_mode),
                          network, scenario, coefficient_set)
    forms = {c: criterion_coeffs(network, c, coefficient_set) for c in CANONICAL_ORDER}
    forms[CriterionId.TIME] = ({FINISH_VAR: 1.0}, 0.0)

    # Degenerate curves allow no slack at any λ > 0, so their caps are hard
    # rows present in every check, including the λ = 0 probe.
    hard_rows = [criterion_cap_row(base, *forms[c], "<=", specs[c].lower)
                 for c in CANONICAL_ORDER if specs[c].degenerate]
    base = with_extra_rows(base, hard_rows)
    soft = [c for c in CANONICAL_ORDER if not specs[c].degenerate]

    probe = _FeasibilityProbe(network, base, scenario.integer_mode)
    if not probe.feasible(()):
        raise InfeasibleScenario(_diagnose(network, scenario, specs, coefficient_set))

    def caps_at(lam: float) -> list[Constraint]:
        return [criterion_cap_row(base, *forms[c], "<=",
                                  invert_membership(specs[c], lam))
                for c in soft]

    lo, hi = 0.0, 1.0
    iterations = 0
    if not soft:
        lo = 1.0    # every criterion is a hard cap already satisfied
    else:
        while hi - lo > scenario.lambda_tolerance:
            mid = 0.5 * (lo + hi)
            iterations += 1
            if probe.feasible(caps_at(mid)):
                lo = mid
            else:
                hi = mid

    # Lexicographic cleanup at the best feasible λ.
    caps = caps_at(lo) if 0.0 < lo < 1.0 else []
    durations: dict[str, float] = {}
    for criterion in (CriterionId.TIME, CriterionId.COST, CriterionId.QUALITY_LOSS):
        durations, _ = probe.minimize(*forms[criterion], caps)
        achieved = evaluate_criterion(network, durations, criterion, coefficient_set)
        caps = caps + [criterion_cap_row(base, *forms[criterion], "<=",
                                         achieved + _cap_tol(achieved))]

    schedule = earliest_start_schedule(network, durations)
    values = {c: evaluate_criterion(network, durations, c, coefficient_set)
              for c in CANONICAL_ORDER}
    memberships = {c: membership(specs[c], values[c]) for c in CANONICAL_ORDER}
    lam = min(memberships.values())
    binding = tuple(c for c in CANONICAL_ORDER if memberships[c] <= lam + 1e-9)
    return SolveResult(
        lambda_=lam,
        durations=durations,
        starts=dict(schedule.starts),
        cost=values[CriterionId.COST],
        time=values[CriterionId.TIME],
        quality_loss=values[CriterionId.QUALITY_LOSS],
        memberships=memberships,
        aggregate_quality=aggregate_quality(network, values[CriterionId.QUALITY_LOSS]),
        binding=binding,
        stats=SolveStats(iterations, probe.milp_nodes),
    )


def _diagnose(network: ProjectNetwork, scenario: Scenario,
              specs: Mapping[CriterionId, MembershipSpec],
              coefficient_set: str) -> str:
    """Name the constraint that makes a scenario unsatisfiable."""
    skeleton = apply_scenario(
        build_schedule_model(network, integer_mode=scenario.integer_mode), network,
        Scenario(quality_floors=scenario.quality_floors,
                 duration_locks=scenario.duration_locks,
                 integer_mode=scenario.integer_mode),
        coefficient_set)
    probe = _FeasibilityProbe(network, skeleton, scenario.integer_mode)
    if not probe.feasible(()):
        return "quality floors conflict with duration locks"
    rows: list[Constraint] = []
    time_form = ({FINISH_VAR: 1.0}, 0.0)
    if scenario.deadline is not None:
        _, best = probe.minimize(*time_form, rows)
        if best > scenario.deadline + 1e-9:
            return (f"deadline {scenario.deadline:g} is below the minimum achievable "
                    f"makespan {best:g}")
        rows.append(criterion_cap_row(skeleton, *time_form, "<=",
                                      float(scenario.deadline)))
    if scenario.budget_cap is not None:
        cost_form = criterion_coeffs(network, CriterionId.COST, coefficient_set)
        _, best = probe.minimize(*cost_form, rows)
        if best > scenario.budget_cap + 1e-6:
            return (f"budget cap {scenario.budget_cap:,.0f} is below the minimum "
                    f"achievable cost {best:,.0f}")
        rows.append(criterion_cap_row(skeleton, *cost_form, "<=",
                                      float(scenario.budget_cap)))
    for criterion in CANONICAL_ORDER:
        spec = specs[criterion]
        if not spec.degenerate:
            continue
        form = (time_form if criterion is CriterionId.TIME
                else criterion_coeffs(network, criterion, coefficient_set))
        _, best = probe.minimize(*form, rows)
        if best > spec.lower + _cap_tol(spec.lower):
            return (f"{criterion.value} cannot reach its pinned bound {spec.lower:g}; "
                    f"minimum achievable is {best:g}")
    return "scenario constraints admit no feasible schedule"
