"""Activity-on-node project networks with crashable durations.

Each activity has a normal and a crash duration; cost rises and quality
drops linearly as the duration is compressed from normal toward crash.
The network is a DAG over activity ids; schedules come from the classic
critical-path forward/backward pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import DurationOutOfRange, NetworkValidationError

TOL = 1e-9

# Violation kinds reported by validate_network.
DUPLICATE_ID = "duplicate-id"
UNKNOWN_PREDECESSOR = "unknown-predecessor"
BOUND_VIOLATION = "bound-violation"
CYCLE_DETECTED = "cycle-detected"

# Named cost-coefficient sets. "table1" derives every slope from the
# activity's own normal/crash endpoints. "appendix" is the alternate set
# bundled with the nine-activity sample project: it overrides the slopes
# of B, E and H (the published cost figures for that sample match these,
# not the endpoint-derived ones).
COEFFICIENT_SETS = ("table1", "appendix")
APPENDIX_SLOPE_OVERRIDES = {"B": 50_000.0, "E": 10_000.0, "H": 90_000.0}


@dataclass(frozen=True)
class Activity:
    """One crashable activity.

    Durations satisfy crash_time <= normal_time; costs satisfy
    normal_cost <= crash_cost; qualities are fractions in [0, 1] with
    crash_quality <= normal_quality. normal_quality defaults to 1.0.
    """

    id: str
    predecessors: tuple[str, ...]
    normal_time: float
    crash_time: float
    normal_cost: float
    crash_cost: float
    crash_quality: float
    normal_quality: float = 1.0

    @property
    def span(self) -> float:
        return self.normal_time - self.crash_time

    @property
    def cost_slope(self) -> float:
        """Extra cost per unit of compression; 0 for fixed-duration activities."""
        if self.span <= 0:
            return 0.0
        return (self.crash_cost - self.normal_cost) / self.span

    @property
    def quality_slope(self) -> float:
        """Quality lost per unit of compression; 0 for fixed-duration activities."""
        if self.span <= 0:
            return 0.0
        return (self.normal_quality - self.crash_quality) / self.span


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    activity_id: str | None = None


@dataclass(frozen=True)
class ProjectNetwork:
    """Validated, immutable network. Activity order is the canonical order."""

    activities: tuple[Activity, ...]
    topo_order: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "_by_id", {a.id: a for a in self.activities})
        succ: dict[str, list[str]] = {a.id: [] for a in self.activities}
        for a in self.activities:
            for p in a.predecessors:
                succ[p].append(a.id)
        object.__setattr__(self, "_successors", {k: tuple(v) for k, v in succ.items()})

    @property
    def n(self) -> int:
        return len(self.activities)

    @property
    def edge_count(self) -> int:
        return sum(len(a.predecessors) for a in self.activities)

    def activity(self, activity_id: str) -> Activity:
        return self._by_id[activity_id]

    def successors(self, activity_id: str) -> tuple[str, ...]:
        return self._successors[activity_id]

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(a.id for a in self.activities)

    @property
    def sinks(self) -> tuple[str, ...]:
        return tuple(a.id for a in self.activities if not self._successors[a.id])


@dataclass(frozen=True)
class Schedule:
    """Earliest-start schedule for a fixed duration vector."""

    starts: dict[str, float]
    durations: dict[str, float]
    makespan: float

    def finish(self, activity_id: str) -> float:
        return self.starts[activity_id] + self.durations[activity_id]


def validate_network(activities: Iterable[Activity]) -> ProjectNetwork:
    """Check every activity and the precedence graph; never stop at the first fault.

    Returns the validated ProjectNetwork or raises NetworkValidationError
    carrying the complete list of violations.
    """
    acts = tuple(activities)
    violations: list[Violation] = []

    seen: set[str] = set()
    for a in acts:
        if a.id in seen:
            violations.append(Violation(DUPLICATE_ID, f"duplicate activity id {a.id!r}", a.id))
        seen.add(a.id)

    known = {a.id for a in acts}
    for a in acts:
        for p in a.predecessors:
            if p not in known:
                violations.append(Violation(
                    UNKNOWN_PREDECESSOR,
                    f"activity {a.id!r} depends on unknown activity {p!r}", a.id))

    for a in acts:
        checks = [
            (a.crash_time <= a.normal_time + TOL,
             f"activity {a.id!r}: crash_time {a.crash_time} exceeds normal_time {a.normal_time}"),
            (a.crash_time >= 0,
             f"activity {a.id!r}: crash_time {a.crash_time} is negative"),
            (a.normal_cost <= a.crash_cost + TOL,
             f"activity {a.id!r}: normal_cost {a.normal_cost} exceeds crash_cost {a.crash_cost}"),
            (0.0 <= a.crash_quality <= 1.0,
             f"activity {a.id!r}: crash_quality {a.crash_quality} outside [0, 1]"),
            (0.0 <= a.normal_quality <= 1.0,
             f"activity {a.id!r}: normal_quality {a.normal_quality} outside [0, 1]"),
            (a.crash_quality <= a.normal_quality + TOL,
             f"activity {a.id!r}: crash_quality {a.crash_quality} exceeds normal_quality {a.normal_quality}"),
        ]
        for ok, message in checks:
            if not ok:
                violations.append(Violation(BOUND_VIOLATION, message, a.id))
        for name, value in (("normal_time", a.normal_time), ("crash_time", a.crash_time),
                            ("normal_cost", a.normal_cost), ("crash_cost", a.crash_cost)):
            if not math.isfinite(value):
                violations.append(Violation(
                    BOUND_VIOLATION, f"activity {a.id!r}: {name} is not finite", a.id))

    topo: list[str] = []
    if not any(v.kind in (DUPLICATE_ID, UNKNOWN_PREDECESSOR) for v in violations):
        topo, cycle = _topological_order(acts)
        if cycle:
            violations.append(Violation(
                CYCLE_DETECTED, "dependency cycle: " + " -> ".join(cycle)))

    if violations:
        raise NetworkValidationError(violations)
    return ProjectNetwork(activities=acts, topo_order=tuple(topo))


def _topological_order(acts: tuple[Activity, ...]) -> tuple[list[str], list[str]]:
    """Kahn's algorithm; on a cycle, returns a concrete cycle path for the report."""
    preds = {a.id: list(a.predecessors) for a in acts}
    succ: dict[str, list[str]] = {a.id: [] for a in acts}
    for a in acts:
        for p in a.predecessors:
            succ[p].append(a.id)
    indeg = {aid: len(ps) for aid, ps in preds.items()}
    order = [a.id for a in acts if indeg[a.id] == 0]
    queue = list(order)
    while queue:
        current = queue.pop(0)
        for nxt in succ[current]:
            indeg[nxt] -= 1
            if indeg[nxt] == 0:
                order.append(nxt)
                queue.append(nxt)
    if len(order) == len(acts):
        return order, []

    # Walk predecessor links inside the unresolved subgraph until a repeat.
    remaining = {aid for aid in indeg if indeg[aid] > 0}
    start = next(a.id for a in acts if a.id in remaining)
    path, seen_at = [start], {start: 0}
    while True:
        current = path[-1]
        nxt = next(p for p in preds[current] if p in remaining)
        if nxt in seen_at:
            cycle = path[seen_at[nxt]:] + [nxt]
            return order, cycle[::-1]
        seen_at[nxt] = len(path)
        path.append(nxt)


def interpolate_cost(activity: Activity, duration: float) -> float:
    """Linear cost at a duration between crash and normal."""
    _check_duration(activity, duration)
    return activity.normal_cost + activity.cost_slope * (activity.normal_time - duration)


def interpolate_quality(activity: Activity, duration: float) -> float:
    """Linear quality at a duration between crash and normal."""
    _check_duration(activity, duration)
    return activity.normal_quality - activity.quality_slope * (activity.normal_time - duration)


def _check_duration(activity: Activity, duration: float) -> None:
    if duration < activity.crash_time - TOL or duration > activity.normal_time + TOL:
        raise DurationOutOfRange(
            f"duration {duration} for activity {activity.id!r} outside "
            f"[{activity.crash_time}, {activity.normal_time}]")


def cost_slopes(network: ProjectNetwork, coefficient_set: str = "table1") -> dict[str, float]:
    """Per-activity cost slopes under a named coefficient set."""
    if coefficient_set not in COEFFICIENT_SETS:
        raise ValueError(f"unknown coefficient set {coefficient_set!r}; "
                         f"expected one of {COEFFICIENT_SETS}")
    slopes = {a.id: a.cost_slope for a in network.activities}
    if coefficient_set == "appendix":
        for aid, slope in APPENDIX_SLOPE_OVERRIDES.items():
            if aid in slopes:
                slopes[aid] = slope
    return slopes


def earliest_start_schedule(network: ProjectNetwork, durations: Mapping[str, float]) -> Schedule:
    """Forward pass: each activity starts when its last predecessor finishes."""
    _check_durations(network, durations)
    starts: dict[str, float] = {}
    finishes: dict[str, float] = {}
    for aid in network.topo_order:
        act = network.activity(aid)
        start = max((finishes[p] for p in act.predecessors), default=0.0)
        starts[aid] = start
        finishes[aid] = start + durations[aid]
    makespan = max((finishes[aid] for aid in network.sinks), default=0.0)
    ordered = {a.id: starts[a.id] for a in network.activities}
    return Schedule(starts=ordered,
                    durations={a.id: float(durations[a.id]) for a in network.activities},
                    makespan=makespan)


def critical_activities(network: ProjectNetwork, durations: Mapping[str, float]) -> frozenset[str]:
    """Activities with zero slack under the earliest-start schedule."""
    schedule = earliest_start_schedule(network, durations)
    slack = activity_slack(network, schedule)
    return frozenset(aid for aid, s in slack.items() if s <= TOL)


def activity_slack(network: ProjectNetwork, schedule: Schedule) -> dict[str, float]:
    """Backward pass: latest-finish minus earliest-finish per activity."""
    latest_finish: dict[str, float] = {}
    for aid in reversed(network.topo_order):
        succ = network.successors(aid)
        if not succ:
            latest_finish[aid] = schedule.makespan
        else:
            latest_finish[aid] = min(
                latest_finish[s] - schedule.durations[s] for s in succ)
    return {a.id: latest_finish[a.id] - schedule.finish(a.id) for a in network.activities}


def total_cost(network: ProjectNetwork, durations: Mapping[str, float],
               coefficient_set: str = "table1") -> float:
    """Project cost at a duration vector under a coefficient set."""
    _check_durations(network, durations)
    slopes = cost_slopes(network, coefficient_set)
    total = 0.0
    for a in network.activities:
        total += a.normal_cost + slopes[a.id] * (a.normal_time - durations[a.id])
    return total


def total_quality_loss(network: ProjectNetwork, durations: Mapping[str, float]) -> float:
    """Summed per-activity quality degradation at a duration vector."""
    _check_durations(network, durations)
    total = 0.0
    for a in network.activities:
        total += a.quality_slope * (a.normal_time - durations[a.id])
    return total


def aggregate_quality(network: ProjectNetwork, quality_loss: float) -> float:
    """Mean activity quality implied by a total quality loss."""
    return 1.0 - quality_loss / network.n


def _check_durations(network: ProjectNetwork, durations: Mapping[str, float]) -> None:
    missing = [a.id for a in network.activities if a.id not in durations]
    if missing:
        raise DurationOutOfRange(f"missing durations for: {', '.join(missing)}")
    for a in network.activities:
        _check_duration(a, durations[a.id])
