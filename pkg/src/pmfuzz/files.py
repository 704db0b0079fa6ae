"""Project and scenario documents, bundled fixtures, machine rendering.

Documents are JSON with fixed field names. Parsing never stops at the
first fault: every problem found lands in the error's violation list so a
bad file is fixed in one pass. The machine rendering keeps a fixed key
order and repr-exact floats, which makes identical results byte-identical
and lets parsed output re-render to the same bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

from .errors import NetworkValidationError, ProjectFileError, ScenarioFileError
from .fuzzy_solver import Scenario, SolveResult
from .objectives import CANONICAL_ORDER, CriterionId, PayoffMatrix
from .project_model import COEFFICIENT_SETS, Activity, ProjectNetwork, validate_network

FORMAT_VERSION = 1

_PROJECT_KEYS = frozenset({
    "format_version", "name", "time_unit", "currency", "coefficient_set",
    "activities"})
_ACTIVITY_KEYS = frozenset({
    "id", "depends_on", "normal_time", "crash_time", "normal_cost",
    "crash_cost", "crash_quality", "normal_quality"})
_SCENARIO_KEYS = frozenset({
    "format_version", "name", "coefficient_set", "quality_floors", "deadline",
    "budget_cap", "duration_locks", "bound_overrides", "integer_mode",
    "lambda_tolerance"})


@dataclass(frozen=True)
class ProjectDocument:
    """A parsed project file: display metadata plus the validated network."""

    name: str
    time_unit: str
    currency: str
    coefficient_set: str
    network: ProjectNetwork


@dataclass(frozen=True)
class ScenarioDocument:
    """A parsed scenario file.

    coefficient_set is None unless the file overrides the project's set.
    """

    name: str
    coefficient_set: str | None
    scenario: Scenario


# ------------------------------------------------------------------ parsing

def _decode(text: str, source: str, error) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise error(f"{source}: not valid JSON: {exc}") from exc


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _check_keys(data: dict, allowed: frozenset, where: str,
                problems: list[str]) -> None:
    for key in data:
        if key not in allowed:
            problems.append(f"{where}: unknown field {key!r}")


def _check_version(data: dict, problems: list[str]) -> None:
    version = data.get("format_version")
    if version != FORMAT_VERSION:
        problems.append(
            f"format_version must be {FORMAT_VERSION}, got {version!r}")


def parse_project(text: str, source: str = "<project>") -> ProjectDocument:
    """Parse and fully validate a project document.

    Raises ProjectFileError carrying every violation found, whether it is
    a document-shape problem or a network-consistency problem.
    """
    data = _decode(text, source, ProjectFileError)
    problems: list[str] = []
    if not isinstance(data, dict):
        raise ProjectFileError(f"{source}: expected a JSON object")
    _check_keys(data, _PROJECT_KEYS, "project", problems)
    _check_version(data, problems)

    name = data.get("name")
    if not isinstance(name, str) or not name:
        problems.append("name must be a non-empty string")
        name = ""
    time_unit = data.get("time_unit", "weeks")
    if not isinstance(time_unit, str):
        problems.append("time_unit must be a string")
        time_unit = "weeks"
    currency = data.get("currency", "units")
    if not isinstance(currency, str):
        problems.append("currency must be a string")
        currency = "units"
    coefficient_set = data.get("coefficient_set", "table1")
    if coefficient_set not in COEFFICIENT_SETS:
        problems.append(
            f"coefficient_set must be one of {list(COEFFICIENT_SETS)}, "
            f"got {coefficient_set!r}")
        coefficient_set = "table1"

    raw_activities = data.get("activities")
    activities: list[Activity] = []
    if not isinstance(raw_activities, list) or not raw_activities:
        problems.append("activities must be a non-empty list")
    else:
        for pos, entry in enumerate(raw_activities):
            parsed = _parse_activity(entry, pos, problems)
            if parsed is not None:
                activities.append(parsed)

    if problems:
        raise ProjectFileError(
            f"{source}: {len(problems)} document problem(s)", problems)
    try:
        network = validate_network(activities)
    except NetworkValidationError as exc:
        raise ProjectFileError(
            f"{source}: {len(exc.violations)} network problem(s)",
            [v.message for v in exc.violations]) from exc
    return ProjectDocument(name, time_unit, currency, coefficient_set, network)


def _parse_activity(entry: Any, pos: int, problems: list[str]) -> Activity | None:
    where = f"activities[{pos}]"
    if not isinstance(entry, dict):
        problems.append(f"{where}: expected an object")
        return None
    _check_keys(entry, _ACTIVITY_KEYS, where, problems)

    aid = entry.get("id")
    if not isinstance(aid, str) or not aid:
        problems.append(f"{where}: id must be a non-empty string")
        return None
    where = f"activity {aid!r}"

    depends_on = entry.get("depends_on", [])
    if (not isinstance(depends_on, list)
            or any(not isinstance(p, str) for p in depends_on)):
        problems.append(f"{where}: depends_on must be a list of activity ids")
        depends_on = []

    numbers: dict[str, float] = {}
    broken = False
    for field in ("normal_time", "crash_time", "normal_cost", "crash_cost",
                  "crash_quality"):
        value = entry.get(field)
        if not _is_number(value):
            problems.append(f"{where}: {field} must be a number")
            broken = True
        else:
            numbers[field] = float(value)
    normal_quality = entry.get("normal_quality", 1.0)
    if not _is_number(normal_quality):
        problems.append(f"{where}: normal_quality must be a number")
        broken = True
    if broken:
        return None
    return Activity(
        id=aid,
        predecessors=tuple(depends_on),
        normal_time=numbers["normal_time"],
        crash_time=numbers["crash_time"],
        normal_cost=numbers["normal_cost"],
        crash_cost=numbers["crash_cost"],
        crash_quality=numbers["crash_quality"],
        normal_quality=float(normal_quality),
    )


def parse_scenario(text: str, source: str = "<scenario>") -> ScenarioDocument:
    """Parse a scenario document.

    Shape problems raise ScenarioFileError with the full violation list.
    Cross-checks against a concrete project (unknown activities, floors
    outside an activity's range) stay with validate_scenario, which needs
    the network.
    """
    data = _decode(text, source, ScenarioFileError)
    problems: list[str] = []
    if not isinstance(data, dict):
        raise ScenarioFileError(f"{source}: expected a JSON object")
    _check_keys(data, _SCENARIO_KEYS, "scenario", problems)
    _check_version(data, problems)

    name = data.get("name", "")
    if not isinstance(name, str):
        problems.append("name must be a string")
        name = ""
    coefficient_set = data.get("coefficient_set")
    if coefficient_set is not None and coefficient_set not in COEFFICIENT_SETS:
        problems.append(
            f"coefficient_set must be one of {list(COEFFICIENT_SETS)}, "
            f"got {coefficient_set!r}")
        coefficient_set = None

    floors = _parse_activity_map(data, "quality_floors", problems)
    locks = _parse_activity_map(data, "duration_locks", problems)
    deadline = _parse_optional_number(data, "deadline", problems)
    budget_cap = _parse_optional_number(data, "budget_cap", problems)
    overrides = _parse_bound_overrides(data, problems)

    integer_mode = data.get("integer_mode", True)
    if not isinstance(integer_mode, bool):
        problems.append("integer_mode must be true or false")
        integer_mode = True
    lambda_tolerance = data.get("lambda_tolerance", 1e-7)
    if not _is_number(lambda_tolerance) or not 0.0 < lambda_tolerance < 1.0:
        problems.append("lambda_tolerance must be a number strictly between 0 and 1")
        lambda_tolerance = 1e-7

    if problems:
        raise ScenarioFileError(
            f"{source}: {len(problems)} document problem(s)", problems)
    scenario = Scenario(
        quality_floors=floors,
        deadline=deadline,
        budget_cap=budget_cap,
        duration_locks=locks,
        bound_overrides=overrides,
        integer_mode=integer_mode,
        lambda_tolerance=float(lambda_tolerance),
    )
    return ScenarioDocument(name, coefficient_set, scenario)


def _parse_activity_map(data: dict, field: str,
                        problems: list[str]) -> dict[str, float]:
    raw = data.get(field, {})
    if not isinstance(raw, dict):
        problems.append(f"{field} must be an object keyed by activity id")
        return {}
    out: dict[str, float] = {}
    for aid, value in raw.items():
        if not _is_number(value):
            problems.append(f"{field}[{aid!r}] must be a number")
        else:
            out[aid] = float(value)
    return out


def _parse_optional_number(data: dict, field: str,
                           problems: list[str]) -> float | None:
    value = data.get(field)
    if value is None:
        return None
    if not _is_number(value):
        problems.append(f"{field} must be a number")
        return None
    return float(value)


def _parse_bound_overrides(data: dict, problems: list[str]):
    raw = data.get("bound_overrides")
    if raw is None:
        return None
    if not isinstance(raw, dict):
        problems.append("bound_overrides must be an object keyed by criterion")
        return None
    names = {c.value: c for c in CANONICAL_ORDER}
    out: dict[CriterionId, tuple[float, float]] = {}
    for key, pair in raw.items():
        if key not in names:
            problems.append(
                f"bound_overrides: unknown criterion {key!r}; "
                f"expected one of {sorted(names)}")
            continue
        if (not isinstance(pair, list) or len(pair) != 2
                or not all(_is_number(v) for v in pair)):
            problems.append(f"bound_overrides[{key!r}] must be [lower, upper]")
            continue
        lower, upper = float(pair[0]), float(pair[1])
        if lower > upper:
            problems.append(
                f"bound_overrides[{key!r}]: lower {lower} exceeds upper {upper}")
            continue
        out[names[key]] = (lower, upper)
    return out or None


def load_project(path: str | Path) -> ProjectDocument:
    return parse_project(_read(path, ProjectFileError), str(path))


def load_scenario(path: str | Path) -> ScenarioDocument:
    return parse_scenario(_read(path, ScenarioFileError), str(path))


def _read(path: str | Path, error) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise error(f"cannot read {path}: {exc.strerror or exc}") from exc


# --------------------------------------------------------- bundled fixtures

def bundled_names() -> tuple[str, ...]:
    """Names of the data files shipped inside the package."""
    root = resources.files("pmfuzz.data")
    return tuple(sorted(
        entry.name[:-5] for entry in root.iterdir()
        if entry.name.endswith(".json")))


def bundled_text(name: str) -> str | None:
    """Content of a bundled fixture, or None when no such fixture exists."""
    stem = name[:-5] if name.endswith(".json") else name
    candidate = resources.files("pmfuzz.data") / f"{stem}.json"
    if not candidate.is_file():
        return None
    return candidate.read_text(encoding="utf-8")


# -------------------------------------------------------- machine rendering

def canonical_json(payload: Any) -> str:
    """Fixed-layout JSON: two-space indent, repr-exact floats, newline end."""
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def solve_result_to_dict(result: SolveResult) -> dict[str, Any]:
    """SolveResult as a plain dict in the documented key order."""
    return {
        "lambda": result.lambda_,
        "durations": {aid: result.durations[aid]
                      for aid in sorted(result.durations)},
        "starts": {aid: result.starts[aid] for aid in sorted(result.starts)},
        "cost": result.cost,
        "time": result.time,
        "quality_loss": result.quality_loss,
        "memberships": {c.value: result.memberships[c] for c in CANONICAL_ORDER},
        "aggregate_quality": result.aggregate_quality,
        "binding": [c.value for c in result.binding],
        "stats": {
            "bisection_iterations": result.stats.bisection_iterations,
            "milp_nodes": result.stats.milp_nodes,
        },
    }


def payoff_to_dict(matrix: PayoffMatrix) -> dict[str, Any]:
    """PayoffMatrix as a plain dict: entries by row, bounds, then solutions."""
    return {
        "entries": {row.value: {col.value: matrix.entries[row][col]
                                for col in CANONICAL_ORDER}
                    for row in CANONICAL_ORDER},
        "lower": {c.value: matrix.lower[c] for c in CANONICAL_ORDER},
        "upper": {c.value: matrix.upper[c] for c in CANONICAL_ORDER},
        "solutions": {row.value: {aid: matrix.solutions[row][aid]
                                  for aid in sorted(matrix.solutions[row])}
                      for row in CANONICAL_ORDER},
    }
