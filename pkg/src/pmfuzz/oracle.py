"""Exhaustive cross-check for the MILP-based solver.

Every integer schedule in the duration box is evaluated directly with
vectorized numpy sweeps: forward pass for the makespan, dot products for
cost and quality loss. The max-λ protocol is then replayed on those exact
values (same bisection, same row tolerances, same lexicographic cleanup),
so any disagreement with the LP route points at the LP route. A guard
refuses boxes too large to sweep honestly. An optional switch rescores the
sweep with the hard-saturating curve variant to measure how much the
smooth tails move the optimum.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Iterator, Mapping

import numpy as np

from .errors import InfeasibleScenario, PmfuzzError, SearchSpaceTooLarge
from .fuzzy_solver import (
    MembershipSpec,
    Scenario,
    SolveResult,
    SolveStats,
    invert_membership,
    membership,
    membership_spec,
    resolve_bounds,
    validate_scenario,
)
from .lp_core import FEAS_TOL, INT_TOL
from .objectives import (
    CANONICAL_ORDER,
    _POLISH_ORDER,
    CriterionId,
    PayoffMatrix,
    _cap_tol,
    criterion_coeffs,
    duration_var,
    evaluate_criterion,
)
from .project_model import ProjectNetwork, aggregate_quality, earliest_start_schedule

DEFAULT_GUARD = 10_000_000

_CHUNK = 1 << 16


@dataclass(frozen=True)
class EnumerationStats:
    """Sweep accounting: box size, scenario-feasible count, wall time."""
    enumerated: int
    feasible: int
    elapsed_seconds: float


# ------------------------------------------------------------- sweep engine

def _integer_box(network: ProjectNetwork, scenario: Scenario) -> list[np.ndarray] | None:
    """Allowed integer durations per activity, or None when locks and floors
    leave some activity without a single admissible duration.

    The lock and floor tests replay the solver's constraint rows at their
    row tolerances rather than re-deriving closed-form bounds, so an
    endpoint duration is kept or dropped by exactly the same arithmetic.
    """
    choices: list[np.ndarray] = []
    for a in network.activities:
        lo = math.ceil(a.crash_time - INT_TOL)
        hi = math.floor(a.normal_time + INT_TOL)
        ds = [float(d) for d in range(int(lo), int(hi) + 1)]
        if a.id in scenario.duration_locks:
            locked = float(scenario.duration_locks[a.id])
            ds = [d for d in ds if abs(d - locked) <= FEAS_TOL]
        if a.id in scenario.quality_floors:
            slope = a.quality_slope
            if slope > 0.0:
                headroom = a.normal_quality - scenario.quality_floors[a.id]
                tol = FEAS_TOL * max(1.0, slope)
                ds = [d for d in ds
                      if slope * (a.normal_time - d) <= headroom + tol]
        if not ds:
            return None
        choices.append(np.asarray(ds, dtype=np.float64))
    return choices


def _box_size(choices: list[np.ndarray]) -> int:
    return math.prod(len(c) for c in choices)


def _chunks(choices: list[np.ndarray]) -> Iterator[tuple[int, np.ndarray]]:
    """Yield (start_index, durations) blocks in mixed-radix order.

    The first activity is the most significant digit and durations ascend
    within each digit, so "first index" ties resolve toward earlier
    activities staying slow. One row per schedule, one column per activity.
    """
    sizes = [len(c) for c in choices]
    total = _box_size(choices)
    strides = [1] * len(sizes)
    for j in range(len(sizes) - 2, -1, -1):
        strides[j] = strides[j + 1] * sizes[j + 1]
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        block = np.empty((idx.size, len(sizes)))
        for j, ch in enumerate(choices):
            block[:, j] = ch[(idx // strides[j]) % sizes[j]]
        yield start, block


def _decode_durations(network: ProjectNetwork, choices: list[np.ndarray],
                      index: int) -> dict[str, float]:
    durations: dict[str, float] = {}
    rem = index
    for j in range(len(choices) - 1, -1, -1):
        rem, digit = divmod(rem, len(choices[j]))
        durations[network.ids[j]] = float(choices[j][digit])
    return durations


class _Space:
    """Linear forms and row tolerances shared by every sweep pass."""

    def __init__(self, network: ProjectNetwork, coefficient_set: str):
        self.network = network
        self.column = {aid: j for j, aid in enumerate(network.ids)}
        self.forms = {c: criterion_coeffs(network, c, coefficient_set)
                      for c in CANONICAL_ORDER}
        self.slope_vec: dict[CriterionId, np.ndarray] = {}
        self.rowtol: dict[CriterionId, float] = {}
        for c in CANONICAL_ORDER:
            coeffs, _ = self.forms[c]
            self.rowtol[c] = FEAS_TOL * max(
                1.0, max((abs(v) for v in coeffs.values()), default=1.0))
            if c is CriterionId.TIME:
                continue
            vec = np.zeros(network.n)
            for aid in network.ids:
                vec[self.column[aid]] = coeffs.get(duration_var(aid), 0.0)
            self.slope_vec[c] = vec

    def values(self, block: np.ndarray) -> dict[CriterionId, np.ndarray]:
        rows = block.shape[0]
        starts: dict[str, np.ndarray] = {}
        for aid in self.network.topo_order:
            es: np.ndarray | None = None
            for pred in self.network.activity(aid).predecessors:
                done = starts[pred] + block[:, self.column[pred]]
                es = done if es is None else np.maximum(es, done)
            starts[aid] = es if es is not None else np.zeros(rows)
        makespan: np.ndarray | None = None
        for aid in self.network.sinks:
            done = starts[aid] + block[:, self.column[aid]]
            makespan = done if makespan is None else np.maximum(makespan, done)
        out = {CriterionId.TIME: makespan}
        for c, vec in self.slope_vec.items():
            out[c] = self.forms[c][1] + block @ vec
        return out


def _feasible_mask(space: _Space, scenario: Scenario,
                   specs: Mapping[CriterionId, MembershipSpec],
                   vals: Mapping[CriterionId, np.ndarray]) -> np.ndarray:
    """Scenario rows plus degenerate hard caps, at the solver's tolerances."""
    mask = np.ones(vals[CriterionId.TIME].shape, dtype=bool)
    if scenario.deadline is not None:
        mask &= vals[CriterionId.TIME] <= float(scenario.deadline) + FEAS_TOL
    if scenario.budget_cap is not None:
        mask &= vals[CriterionId.COST] <= (float(scenario.budget_cap)
                                           + space.rowtol[CriterionId.COST])
    for c, spec in specs.items():
        if spec.degenerate:
            mask &= vals[c] <= spec.lower + space.rowtol[c]
    return mask


def _curve(spec: MembershipSpec, z: np.ndarray) -> np.ndarray:
    """Vectorized satisfaction degrees; matches membership() pointwise."""
    if spec.degenerate:
        edge = spec.lower + 1e-9 * max(1.0, abs(spec.lower))
        return np.where(z <= edge, 1.0, 0.0)
    mid = 0.5 * (spec.lower + spec.upper)
    return 0.5 * np.tanh(spec.steepness * (mid - z)) + 0.5


def _clamped_curve(spec: MembershipSpec, z: np.ndarray) -> np.ndarray:
    """Hard-saturating variant: exactly 1 at or below the lower bound and
    exactly 0 at or above the upper, smooth in between. It differs from the
    smooth curve by at most (1 - tanh(3))/2, about 0.00247, in the tails."""
    if spec.degenerate:
        return _curve(spec, z)
    return np.where(z <= spec.lower, 1.0,
                    np.where(z >= spec.upper, 0.0, _curve(spec, z)))


def _clamped_point(spec: MembershipSpec, z: float) -> float:
    if spec.degenerate:
        return membership(spec, z)
    if z <= spec.lower:
        return 1.0
    if z >= spec.upper:
        return 0.0
    return membership(spec, z)


def _sweep(space: _Space, choices: list[np.ndarray],
           visit: Callable[[int, dict[CriterionId, np.ndarray]], None]) -> None:
    for start, block in _chunks(choices):
        visit(start, space.values(block))


# ----------------------------------------------------------------- protocol

def enumerate_optimal(network: ProjectNetwork, bounds=None,
                      scenario: Scenario | None = None, *,
                      coefficient_set: str = "table1",
                      guard: int = DEFAULT_GUARD,
                      clamped_membership: bool = False) -> tuple[SolveResult, EnumerationStats]:
    """Replay the max-λ protocol over an exhaustive sweep of the box.

    Returns the same result shape as the MILP route (milp_nodes is 0) plus
    sweep statistics. Bisection verdicts come from the maximum over
    schedules of the row-tolerance-adjusted satisfaction floor, which is
    exactly the question each MILP probe answers, so both routes walk the
    same λ bracket.

    With clamped_membership the sweep scores schedules by the
    hard-saturating curve instead and returns the plain lexicographic
    maximizer (best λ, then least time, cost, quality loss) with no
    tolerance replay. That quantifies how far the smooth tails move the
    optimum; the λ values differ by at most (1 - tanh(3))/2 ≈ 0.00247.
    """
    started = time.perf_counter()
    scenario = scenario or Scenario()
    validate_scenario(network, scenario)
    if not scenario.integer_mode:
        raise PmfuzzError("the exhaustive oracle sweeps integer schedules only")
    if bounds is None:
        bounds = enumerate_payoff(network, coefficient_set, guard=guard)
    resolved = resolve_bounds(network, bounds, scenario, coefficient_set)
    specs = {c: membership_spec(c, *resolved[c]) for c in CANONICAL_ORDER}

    choices = _integer_box(network, scenario)
    if choices is None:
        raise InfeasibleScenario("quality floors conflict with duration locks")
    total = _box_size(choices)
    if total > guard:
        raise SearchSpaceTooLarge(
            f"{total:,} integer schedules exceed the oracle guard of {guard:,}")

    space = _Space(network, coefficient_set)
    soft = [c for c in CANONICAL_ORDER if not specs[c].degenerate]

    feasible = 0
    best_floor = -math.inf

    def survey(start: int, vals: dict[CriterionId, np.ndarray]) -> None:
        nonlocal feasible, best_floor
        mask = _feasible_mask(space, scenario, specs, vals)
        feasible += int(mask.sum())
        if clamped_membership or not soft or not mask.any():
            return
        floor: np.ndarray | None = None
        for c in soft:
            mu = _curve(specs[c], vals[c][mask] - space.rowtol[c])
            floor = mu if floor is None else np.minimum(floor, mu)
        best_floor = max(best_floor, float(floor.max()))

    _sweep(space, choices, survey)
    if feasible == 0:
        raise InfeasibleScenario(
            "scenario constraints admit no feasible schedule "
            f"(exhausted {total:,} candidates)")

    if clamped_membership:
        winner_index, iterations = _clamped_argmax(
            space, scenario, specs, soft, choices), 0
    else:
        winner_index, iterations = _replay_protocol(
            space, scenario, specs, soft, choices, best_floor,
            scenario.lambda_tolerance)

    durations = _decode_durations(network, choices, winner_index)
    schedule = earliest_start_schedule(network, durations)
    values = {c: evaluate_criterion(network, durations, c, coefficient_set)
              for c in CANONICAL_ORDER}
    point = _clamped_point if clamped_membership else membership
    memberships = {c: point(specs[c], values[c]) for c in CANONICAL_ORDER}
    lam = min(memberships.values())
    binding = tuple(c for c in CANONICAL_ORDER if memberships[c] <= lam + 1e-9)
    result = SolveResult(
        lambda_=lam,
        durations=durations,
        starts=dict(schedule.starts),
        cost=values[CriterionId.COST],
        time=values[CriterionId.TIME],
        quality_loss=values[CriterionId.QUALITY_LOSS],
        memberships=memberships,
        aggregate_quality=aggregate_quality(network, values[CriterionId.QUALITY_LOSS]),
        binding=binding,
        stats=SolveStats(iterations, 0),
    )
    stats = EnumerationStats(total, feasible, time.perf_counter() - started)
    return result, stats


def _replay_protocol(space: _Space, scenario: Scenario,
                     specs: Mapping[CriterionId, MembershipSpec],
                     soft: list[CriterionId], choices: list[np.ndarray],
                     best_floor: float, tolerance: float) -> tuple[int, int]:
    """Bisection bracket plus lexicographic cleanup, as the MILP route runs it.

    Returns the winning mixed-radix index and the bisection step count.
    """
    lo, hi = 0.0, 1.0
    iterations = 0
    if not soft:
        lo = 1.0
    else:
        while hi - lo > tolerance:
            mid = 0.5 * (lo + hi)
            iterations += 1
            if best_floor >= mid:
                lo = mid
            else:
                hi = mid

    caps: list[tuple[CriterionId, float]] = []
    if 0.0 < lo < 1.0:
        caps = [(c, invert_membership(specs[c], lo) + space.rowtol[c])
                for c in soft]

    def stage_min(criterion: CriterionId,
                  windows: list[tuple[CriterionId, float]]) -> float:
        best = math.inf

        def visit(start: int, vals: dict[CriterionId, np.ndarray]) -> None:
            nonlocal best
            mask = _feasible_mask(space, scenario, specs, vals)
            for c, cap in windows:
                mask &= vals[c] <= cap
            if mask.any():
                best = min(best, float(vals[criterion][mask].min()))

        _sweep(space, choices, visit)
        if not math.isfinite(best):
            raise PmfuzzError("cleanup stage unexpectedly infeasible")
        return best

    for criterion in (CriterionId.TIME, CriterionId.COST, CriterionId.QUALITY_LOSS):
        achieved = stage_min(criterion, caps)
        if criterion is CriterionId.QUALITY_LOSS:
            final_value = achieved
        else:
            caps = caps + [(criterion,
                            achieved + _cap_tol(achieved) + space.rowtol[criterion])]

    winner_index = -1

    def pick(start: int, vals: dict[CriterionId, np.ndarray]) -> None:
        nonlocal winner_index
        if winner_index >= 0:
            return
        mask = _feasible_mask(space, scenario, specs, vals)
        for c, cap in caps:
            mask &= vals[c] <= cap
        mask &= vals[CriterionId.QUALITY_LOSS] == final_value
        hits = np.flatnonzero(mask)
        if hits.size:
            winner_index = start + int(hits[0])

    _sweep(space, choices, pick)
    if winner_index < 0:
        raise PmfuzzError("cleanup stage lost its own optimum")
    return winner_index, iterations


def _clamped_argmax(space: _Space, scenario: Scenario,
                    specs: Mapping[CriterionId, MembershipSpec],
                    soft: list[CriterionId],
                    choices: list[np.ndarray]) -> int:
    """First mixed-radix index of the lexicographically best schedule under
    the hard-saturating curve: greatest λ, then least time, cost, and
    quality loss, every comparison exact."""
    best: tuple[float, float, float, float, int] | None = None

    def visit(start: int, vals: dict[CriterionId, np.ndarray]) -> None:
        nonlocal best
        mask = _feasible_mask(space, scenario, specs, vals)
        if not mask.any():
            return
        rows = np.flatnonzero(mask)
        if soft:
            lam: np.ndarray | None = None
            for c in soft:
                mu = _clamped_curve(specs[c], vals[c][rows])
                lam = mu if lam is None else np.minimum(lam, mu)
        else:
            lam = np.ones(rows.size)
        # lexsort is stable and keys are listed least significant first,
        # so the earliest row wins full ties
        order = np.lexsort((vals[CriterionId.QUALITY_LOSS][rows],
                            vals[CriterionId.COST][rows],
                            vals[CriterionId.TIME][rows],
                            -lam))
        j = int(order[0])
        key = (-float(lam[j]),
               float(vals[CriterionId.TIME][rows[j]]),
               float(vals[CriterionId.COST][rows[j]]),
               float(vals[CriterionId.QUALITY_LOSS][rows[j]]),
               start + int(rows[j]))
        if best is None or key < best:
            best = key

    _sweep(space, choices, visit)
    if best is None:
        raise PmfuzzError("argmax pass saw no feasible schedule")
    return best[-1]


def min_criterion_over_box(network: ProjectNetwork, criterion: CriterionId,
                           scenario: Scenario | None = None, *,
                           caps: Mapping[CriterionId, float] | None = None,
                           coefficient_set: str = "table1",
                           guard: int = DEFAULT_GUARD) -> float:
    """Exact minimum of one criterion under scenario rows and optional caps."""
    scenario = scenario or Scenario()
    validate_scenario(network, scenario)
    if not scenario.integer_mode:
        raise PmfuzzError("the exhaustive oracle sweeps integer schedules only")
    choices = _integer_box(network, scenario)
    if choices is None:
        raise InfeasibleScenario("quality floors conflict with duration locks")
    total = _box_size(choices)
    if total > guard:
        raise SearchSpaceTooLarge(
            f"{total:,} integer schedules exceed the oracle guard of {guard:,}")
    space = _Space(network, coefficient_set)
    best = math.inf

    def visit(start: int, vals: dict[CriterionId, np.ndarray]) -> None:
        nonlocal best
        mask = _feasible_mask(space, scenario, {}, vals)
        if caps:
            for c, bound in caps.items():
                mask &= vals[c] <= float(bound) + space.rowtol[c]
        if mask.any():
            best = min(best, float(vals[criterion][mask].min()))

    _sweep(space, choices, visit)
    if not math.isfinite(best):
        raise InfeasibleScenario("no schedule satisfies the scenario and caps")
    return best


def enumerate_payoff(network: ProjectNetwork, coefficient_set: str = "table1", *,
                     guard: int = DEFAULT_GUARD) -> PayoffMatrix:
    """Payoff matrix by sweep, mirroring the tie-cleanup of the MILP route.

    Each criterion is minimized over the full box, then ties are resolved
    by pushing the remaining criteria to their worst values in the fixed
    cleanup order (time through its total-duration proxy), with the same
    tolerance windows the row-based route enforces.
    """
    choices = _integer_box(network, Scenario())
    assert choices is not None  # the plain box is never empty
    total = _box_size(choices)
    if total > guard:
        raise SearchSpaceTooLarge(
            f"{total:,} integer schedules exceed the oracle guard of {guard:,}")
    space = _Space(network, coefficient_set)

    def extreme(target: CriterionId | None, maximize: bool,
                windows: list[tuple[CriterionId | None, float, bool]]) -> float:
        best = -math.inf if maximize else math.inf

        def visit(start: int, vals: dict[CriterionId, np.ndarray]) -> None:
            nonlocal best
            mask = np.ones(vals[CriterionId.TIME].shape, dtype=bool)
            for c, cap, upper in windows:
                vec = vals[c] if c is not None else vals["total"]
                mask &= (vec <= cap) if upper else (vec >= cap)
            if not mask.any():
                return
            vec = vals[target] if target is not None else vals["total"]
            picked = vec[mask]
            best = max(best, float(picked.max())) if maximize \
                else min(best, float(picked.min()))

        _sweep_with_total(space, choices, visit)
        if not math.isfinite(best):
            raise PmfuzzError("payoff stage unexpectedly infeasible")
        return best

    solutions: dict[CriterionId, dict[str, float]] = {}
    entries: dict[CriterionId, dict[CriterionId, float]] = {}
    for k in CANONICAL_ORDER:
        best_k = extreme(k, False, [])
        windows: list[tuple[CriterionId | None, float, bool]] = [
            (k, best_k + _cap_tol(best_k) + space.rowtol[k], True)]
        stages = [c for c in _POLISH_ORDER if c is not k]
        last_value = 0.0
        for c in stages:
            proxy = c is CriterionId.TIME
            target = None if proxy else c
            achieved = extreme(target, True, windows)
            last_value = achieved
            if not proxy:
                windows.append(
                    (c, achieved - _cap_tol(achieved) - space.rowtol[c], False))

        final_stage = stages[-1]
        winner_index = -1

        def pick(start: int, vals: dict[CriterionId, np.ndarray]) -> None:
            nonlocal winner_index
            if winner_index >= 0:
                return
            mask = np.ones(vals[CriterionId.TIME].shape, dtype=bool)
            for c, cap, upper in windows:
                vec = vals[c] if c is not None else vals["total"]
                mask &= (vec <= cap) if upper else (vec >= cap)
            vec = (vals["total"] if final_stage is CriterionId.TIME
                   else vals[final_stage])
            mask &= vec == last_value
            hits = np.flatnonzero(mask)
            if hits.size:
                winner_index = start + int(hits[0])

        _sweep_with_total(space, choices, pick)
        if winner_index < 0:
            raise PmfuzzError("payoff stage lost its own optimum")
        durations = _decode_durations(network, choices, winner_index)
        solutions[k] = durations
        entries[k] = {c: evaluate_criterion(network, durations, c, coefficient_set)
                      for c in CANONICAL_ORDER}
    lower = {c: min(entries[r][c] for r in CANONICAL_ORDER) for c in CANONICAL_ORDER}
    upper = {c: max(entries[r][c] for r in CANONICAL_ORDER) for c in CANONICAL_ORDER}
    return PayoffMatrix(solutions, entries, lower, upper)


def _sweep_with_total(space: _Space, choices: list[np.ndarray],
                      visit: Callable[[int, dict], None]) -> None:
    """Like _sweep but the value dict also carries the total-duration proxy."""
    for start, block in _chunks(choices):
        vals = dict(space.values(block))
        vals["total"] = block.sum(axis=1)
        visit(start, vals)
