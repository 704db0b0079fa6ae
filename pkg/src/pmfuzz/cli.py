"""Command-line surface for the workbench.

Subcommands: validate, cpm, payoff, solve, sweep, serve. Projects and
scenarios are file paths or bundled fixture names. Exit codes: 0 success,
1 validation problem, 2 infeasible scenario, 3 internal limit or oracle
disagreement. PMFUZZ_LOG sets log verbosity on stderr.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from typing import Sequence

from . import __version__
from .errors import (
    InfeasibleScenario,
    PmfuzzError,
    ProjectFileError,
    ScenarioFileError,
    ScenarioValidationError,
    SearchSpaceTooLarge,
)
from .files import (
    ProjectDocument,
    ScenarioDocument,
    bundled_names,
    bundled_text,
    canonical_json,
    load_project,
    load_scenario,
    parse_project,
    parse_scenario,
    payoff_to_dict,
    solve_result_to_dict,
)
from .fuzzy_solver import Scenario, SolveResult, solve_max_lambda
from .objectives import CANONICAL_ORDER, CriterionId, payoff_matrix
from .oracle import enumerate_optimal
from .project_model import ProjectNetwork, Schedule, earliest_start_schedule

log = logging.getLogger("pmfuzz.cli")

ORACLE_LAMBDA_TOLERANCE = 1e-6


class _UsageProblem(PmfuzzError):
    """A command-line argument is shaped wrong (bad range syntax and such)."""


class _Parser(argparse.ArgumentParser):
    # spec reserves exit code 2 for infeasible scenarios, so usage
    # problems exit 1 instead of argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pmfuzz",
                     description="fuzzy cost/time/quality crashing workbench")
    parser.add_argument("--version", action="version",
                        version=f"pmfuzz {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a project file")
    p.add_argument("project")
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("cpm", help="earliest-start schedule at fixed durations")
    p.add_argument("project")
    p.add_argument("--mode", choices=("normal", "crash"), default="normal")
    p.set_defaults(handler=cmd_cpm)

    p = sub.add_parser("payoff", help="per-criterion optima and bounds table")
    p.add_argument("project")
    p.set_defaults(handler=cmd_payoff)

    p = sub.add_parser("solve", help="maximize the smallest membership")
    p.add_argument("project")
    p.add_argument("--scenario", help="scenario file or bundled name")
    p.add_argument("--oracle", action="store_true",
                   help="cross-check against the exhaustive sweep")
    p.add_argument("--format", choices=("table", "machine"), default="table")
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser("sweep", help="one solve per grid point of a constraint")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--deadline", metavar="LO..HI")
    group.add_argument("--quality-floor", metavar="ID=LO..HI:STEP")
    p.add_argument("project")
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--project-dir", default=None)
    p.set_defaults(handler=cmd_serve)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return args.handler(args)
    except InfeasibleScenario as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 2
    except (_UsageProblem, ScenarioValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ProjectFileError, ScenarioFileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        for violation in exc.violations:
            print(f"  - {violation}", file=sys.stderr)
        return 1
    except SearchSpaceTooLarge as exc:
        print(f"limit: {exc}", file=sys.stderr)
        return 3
    except PmfuzzError as exc:
        print(f"internal: {exc}", file=sys.stderr)
        return 3


def _configure_logging() -> None:
    wanted = os.environ.get("PMFUZZ_LOG", "").strip()
    if not wanted:
        return
    level = getattr(logging, wanted.upper(), None)
    if not isinstance(level, int):
        level = logging.INFO
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


# ------------------------------------------------------------------ commands

def cmd_validate(args) -> int:
    doc = _resolve_project(args.project)
    print(f"{doc.name}: valid, {doc.network.n} activities, "
          f"{doc.network.edge_count} precedence edges")
    return 0


def cmd_cpm(args) -> int:
    doc = _resolve_project(args.project)
    network = doc.network
    durations = {a.id: (a.normal_time if args.mode == "normal" else a.crash_time)
                 for a in network.activities}
    schedule = earliest_start_schedule(network, durations)
    slack = _slacks(network, schedule)
    critical = [aid for aid in network.ids if slack[aid] <= 1e-9]

    print(f"{doc.name}: {args.mode} durations, {doc.time_unit}")
    rows = [("activity", "duration", "start", "finish", "slack", "")]
    for aid in network.ids:
        rows.append((aid, _num(durations[aid]), _num(schedule.starts[aid]),
                     _num(schedule.finish(aid)), _num(slack[aid]),
                     "*" if aid in critical else ""))
    print(_table(rows))
    print(f"makespan: {_num(schedule.makespan)} {doc.time_unit}")
    print("critical: " + " ".join(critical))
    return 0


def cmd_payoff(args) -> int:
    doc = _resolve_project(args.project)
    matrix = payoff_matrix(doc.network, doc.coefficient_set)
    log.debug("payoff bounds: %s", matrix.bounds())

    print(f"{doc.name}: payoff matrix, {doc.coefficient_set} coefficients")
    rows = [("minimized", *(c.value for c in CANONICAL_ORDER))]
    for row in CANONICAL_ORDER:
        rows.append((row.value,
                     *(_criterion(col, matrix.entries[row][col])
                       for col in CANONICAL_ORDER)))
    print(_table(rows))
    print("bounds:")
    for c in CANONICAL_ORDER:
        print(f"  {c.value}: [{_criterion(c, matrix.lower[c])}, "
              f"{_criterion(c, matrix.upper[c])}]")
    for note in _reference_divergence(doc, matrix):
        print(note)
    return 0


def _reference_divergence(doc: ProjectDocument, matrix) -> list[str]:
    """Compare computed bounds against the bundled study's published ones.

    Only the bundled table1 instance has a published reference; anything
    else returns no notes.
    """
    if doc.name != "table1":
        return []
    reference = parse_scenario(bundled_text("paper-bounds"),
                               "bundled:paper-bounds").scenario.bound_overrides
    notes = []
    for c in CANONICAL_ORDER:
        for side, computed in (("lower", matrix.lower[c]), ("upper", matrix.upper[c])):
            published = reference[c][0 if side == "lower" else 1]
            if abs(computed - published) > 1e-9 * max(1.0, abs(published)):
                notes.append(
                    f"note: computed {c.value} {side} bound "
                    f"{_criterion(c, computed)} differs from the bundled "
                    f"reference {_criterion(c, published)}")
    return notes


def cmd_solve(args) -> int:
    doc = _resolve_project(args.project)
    sdoc = _resolve_scenario(args.scenario) if args.scenario else None
    scenario = sdoc.scenario if sdoc else Scenario()
    coefficient_set = (sdoc.coefficient_set if sdoc and sdoc.coefficient_set
                       else doc.coefficient_set)

    result = solve_max_lambda(doc.network, None, scenario,
                              coefficient_set=coefficient_set)
    log.debug("solved: lambda=%.9f nodes=%d", result.lambda_,
              result.stats.milp_nodes)

    verdict_lines: list[str] = []
    exit_code = 0
    if args.oracle:
        swept, stats = enumerate_optimal(doc.network, None, scenario,
                                         coefficient_set=coefficient_set)
        verdict_lines.append(
            f"oracle: swept {stats.enumerated:,} schedules, "
            f"{stats.feasible:,} feasible")
        agree = (abs(swept.lambda_ - result.lambda_) <= ORACLE_LAMBDA_TOLERANCE
                 and swept.time == result.time
                 and swept.cost == result.cost
                 and swept.quality_loss == result.quality_loss)
        if agree:
            verdict_lines.append(
                f"oracle agreement: lambda {_lam(swept.lambda_)} and "
                "polished values match")
        else:
            verdict_lines.append(
                "oracle DISAGREEMENT: "
                f"lambda {_lam(result.lambda_)} vs {_lam(swept.lambda_)}, "
                f"cost {_money(result.cost)} vs {_money(swept.cost)}, "
                f"time {_num(result.time)} vs {_num(swept.time)}, "
                f"quality loss {_num(result.quality_loss)} vs "
                f"{_num(swept.quality_loss)}")
            exit_code = 3

    if args.format == "machine":
        sys.stdout.write(canonical_json(solve_result_to_dict(result)))
        for line in verdict_lines:   # keep stdout parseable
            print(line, file=sys.stderr)
    else:
        _print_solve_table(doc, sdoc, coefficient_set, result)
        for line in verdict_lines:
            print(line)
    return exit_code


def _print_solve_table(doc: ProjectDocument, sdoc: ScenarioDocument | None,
                       coefficient_set: str, result: SolveResult) -> None:
    label = sdoc.name if sdoc and sdoc.name else ("(none)" if sdoc is None
                                                  else "(unnamed)")
    print(f"{doc.name}: solve, {coefficient_set} coefficients, scenario {label}")
    print(f"lambda: {_lam(result.lambda_)}  "
          f"({result.stats.bisection_iterations} bisection steps, "
          f"{result.stats.milp_nodes} nodes)")
    rows = [("criterion", "value", "membership", "")]
    for c in CANONICAL_ORDER:
        value = {CriterionId.COST: result.cost, CriterionId.TIME: result.time,
                 CriterionId.QUALITY_LOSS: result.quality_loss}[c]
        rows.append((c.value, _criterion(c, value), _lam(result.memberships[c]),
                     "binding" if c in result.binding else ""))
    print(_table(rows))
    print(f"aggregate quality: {_lam(result.aggregate_quality)}")
    rows = [("activity", "duration", "start", "finish")]
    for aid in doc.network.ids:
        rows.append((aid, _num(result.durations[aid]), _num(result.starts[aid]),
                     _num(result.starts[aid] + result.durations[aid])))
    print(_table(rows))


def cmd_sweep(args) -> int:
    doc = _resolve_project(args.project)
    if args.deadline is not None:
        label = "deadline"
        lo, hi = _parse_range(args.deadline)
        grid = _grid(lo, hi, 1.0)
        scenarios = [(value, Scenario(deadline=value)) for value in grid]
    else:
        label, lo, hi, step = _parse_floor_spec(args.quality_floor)
        grid = _grid(lo, hi, step)
        scenarios = [(value, Scenario(quality_floors={label: value}))
                     for value in grid]
        label = f"floor {label}"

    print(f"{doc.name}: sweep over {label}")
    rows = [(label, "lambda", "cost", "time", "quality_loss")]
    for value, scenario in scenarios:
        try:
            r = solve_max_lambda(doc.network, None, scenario,
                                 coefficient_set=doc.coefficient_set)
            rows.append((_num(value), _lam(r.lambda_), _money(r.cost),
                         _num(r.time), _num(r.quality_loss)))
        except InfeasibleScenario:
            rows.append((_num(value), "infeasible", "-", "-", "-"))
    print(_table(rows))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(project_dir=args.project_dir)
    log.info("serving on 127.0.0.1:%d", args.port)
    uvicorn.run(app, host="127.0.0.1", port=args.port, log_level="warning")
    return 0


# ------------------------------------------------------------------- helpers

def _resolve_project(name: str) -> ProjectDocument:
    if os.path.exists(name):
        return load_project(name)
    text = bundled_text(name)
    if text is not None:
        return parse_project(text, f"bundled:{name}")
    raise ProjectFileError(
        f"{name}: no such file or bundled fixture "
        f"(bundled: {', '.join(bundled_names())})")


def _resolve_scenario(name: str) -> ScenarioDocument:
    if os.path.exists(name):
        return load_scenario(name)
    text = bundled_text(name)
    if text is not None:
        return parse_scenario(text, f"bundled:{name}")
    raise ScenarioFileError(
        f"{name}: no such file or bundled fixture "
        f"(bundled: {', '.join(bundled_names())})")


def _slacks(network: ProjectNetwork, schedule: Schedule) -> dict[str, float]:
    """Total float per activity from the backward pass at the same makespan."""
    latest_finish = {aid: schedule.makespan for aid in network.ids}
    for aid in reversed(network.topo_order):
        followers = network.successors(aid)
        if followers:
            latest_finish[aid] = min(
                latest_finish[s] - schedule.durations[s] for s in followers)
    return {aid: latest_finish[aid] - schedule.finish(aid)
            for aid in network.ids}


def _parse_range(text: str) -> tuple[float, float]:
    lo, sep, hi = text.partition("..")
    if not sep:
        raise _UsageProblem(f"range {text!r} must look like LO..HI")
    try:
        return float(lo), float(hi)
    except ValueError:
        raise _UsageProblem(f"range {text!r} must use numbers") from None


def _parse_floor_spec(text: str) -> tuple[str, float, float, float]:
    aid, sep, rest = text.partition("=")
    if not sep or not aid:
        raise _UsageProblem(
            f"quality-floor {text!r} must look like ID=LO..HI:STEP")
    span, sep, step_text = rest.partition(":")
    if not sep:
        raise _UsageProblem(
            f"quality-floor {text!r} must end with a :STEP increment")
    lo, hi = _parse_range(span)
    try:
        step = float(step_text)
    except ValueError:
        raise _UsageProblem(f"step {step_text!r} must be a number") from None
    if step <= 0:
        raise _UsageProblem("step must be positive")
    return aid, lo, hi, step


def _grid(lo: float, hi: float, step: float) -> list[float]:
    if hi < lo:
        return []
    count = int((hi - lo) / step + 1e-9)
    return [lo + i * step for i in range(count + 1)]


def _money(value: float) -> str:
    return f"{int(round(value)):,}"


def _lam(value: float) -> str:
    return f"{value:.7f}"


def _num(value: float) -> str:
    return f"{value:g}"


def _criterion(criterion: CriterionId, value: float) -> str:
    return _money(value) if criterion is CriterionId.COST else _num(value)


def _table(rows: list[tuple[str, ...]]) -> str:
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    return "\n".join(
        "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip()
        for row in rows)
