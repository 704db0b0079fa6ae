"""Shared fixtures: the nine-activity sample network and small helpers."""

from __future__ import annotations

import pytest

from pmfuzz.project_model import Activity, validate_network

TABLE1_ROWS = [
    # id, preds,            normal_time, crash_time, normal_cost, crash_cost, crash_quality
    ("A", (),               10, 6, 500_000, 700_000, 0.85),
    ("B", ("A",),            9, 7, 450_000, 600_000, 0.88),
    ("C", ("B",),            4, 3, 150_000, 210_000, 0.95),
    ("D", ("B",),            6, 4, 120_000, 200_000, 0.80),
    ("E", ("B",),            3, 2, 300_000, 400_000, 0.82),
    ("F", ("C", "D"),        7, 5, 210_000, 290_000, 0.93),
    ("G", ("D", "E"),        5, 3, 400_000, 550_000, 0.90),
    ("H", ("E",),            6, 3, 330_000, 510_000, 0.75),
    ("I", ("F", "G", "H"),  10, 7, 600_000, 840_000, 0.80),
]


def build_table1_activities() -> list[Activity]:
    return [
        Activity(id=aid, predecessors=preds, normal_time=nt, crash_time=ct,
                 normal_cost=nc, crash_cost=cc, crash_quality=cq)
        for aid, preds, nt, ct, nc, cc, cq in TABLE1_ROWS
    ]


@pytest.fixture(scope="session")
def table1():
    return validate_network(build_table1_activities())


def normal_durations(network):
    return {a.id: a.normal_time for a in network.activities}


def crash_durations(network):
    return {a.id: a.crash_time for a in network.activities}


def paper_bounds():
    """Criterion ranges used in the published worked example."""
    from pmfuzz.objectives import CriterionId
    return {
        CriterionId.COST: (3_060_000.0, 4_250_000.0),
        CriterionId.TIME: (29.0, 42.0),
        CriterionId.QUALITY_LOSS: (0.0, 1.0),
    }


def random_network(rng, max_box=30_000):
    """Small random crashable project for solver/oracle cross-checks.

    Integer times and costs with span-divisible cost deltas keep every
    criterion on a coarse value lattice, so near-tie artifacts cannot blur
    route comparisons. The duration box is trimmed until the oracle can
    sweep it comfortably.
    """
    n = rng.randint(3, 8)
    spans = [rng.randint(0, 4) for _ in range(n)]
    while _box(spans) > max_box:
        j = rng.randrange(n)
        spans[j] = max(0, spans[j] - 1)
    activities = []
    for j in range(n):
        preds = tuple(f"T{k}" for k in range(j) if rng.random() < 0.4)
        span = spans[j]
        normal_time = rng.randint(span + 2, span + 10)
        normal_cost = 100 * rng.randint(10, 200)
        cost_slope = 10 * rng.randint(5, 50)
        quality_slope = rng.randint(1, 8) / 100.0
        normal_quality = rng.randint(90, 100) / 100.0
        activities.append(Activity(
            id=f"T{j}",
            predecessors=preds,
            normal_time=float(normal_time),
            crash_time=float(normal_time - span),
            normal_cost=float(normal_cost),
            crash_cost=float(normal_cost + span * cost_slope),
            crash_quality=round(normal_quality - span * quality_slope, 10),
            normal_quality=normal_quality,
        ))
    return validate_network(activities)


def random_scenario(rng, network):
    """Random what-if constraints for a network.

    Each constraint is satisfiable on its own but combinations may clash;
    that is intentional, so infeasibility verdicts get cross-checked too.
    """
    from pmfuzz.fuzzy_solver import Scenario
    from pmfuzz.project_model import earliest_start_schedule, total_cost

    kwargs = {}
    if rng.random() < 0.4:
        a = rng.choice(network.activities)
        lo, hi = int(a.crash_time), int(a.normal_time)
        kwargs["duration_locks"] = {a.id: float(rng.randint(lo, hi))}
    if rng.random() < 0.4:
        candidates = [a for a in network.activities
                      if a.quality_slope > 0.0 and a.id not in
                      kwargs.get("duration_locks", {})]
        if candidates:
            a = rng.choice(candidates)
            floor = round(rng.uniform(a.crash_quality, a.normal_quality), 2)
            floor = min(max(floor, a.crash_quality), a.normal_quality)
            kwargs["quality_floors"] = {a.id: floor}
    normal = {a.id: a.normal_time for a in network.activities}
    crash = {a.id: a.crash_time for a in network.activities}
    if rng.random() < 0.4:
        slow = earliest_start_schedule(network, normal).makespan
        fast = earliest_start_schedule(network, crash).makespan
        kwargs["deadline"] = float(rng.randint(int(fast), int(slow)))
    if rng.random() < 0.3:
        cheap = total_cost(network, normal)
        dear = total_cost(network, crash)
        kwargs["budget_cap"] = round(cheap + rng.uniform(0.1, 0.9) * (dear - cheap))
    return Scenario(**kwargs)


def _box(spans):
    out = 1
    for s in spans:
        out *= s + 1
    return out
