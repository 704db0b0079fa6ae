"""HTTP facade over the solver for interactive what-if clients.

Projects are uploaded once and held in memory; every solve runs on an
immutable snapshot, so identical requests return identical bytes. All
bodies and responses use the same canonical JSON as the CLI machine
format, letting HTTP clients and file-based workflows share fixtures.
"""

from __future__ import annotations

import itertools
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from starlette.concurrency import run_in_threadpool

from . import __version__
from .errors import (
    InfeasibleScenario,
    ProjectFileError,
    ScenarioFileError,
    ScenarioValidationError,
)
from .files import (
    ProjectDocument,
    canonical_json,
    load_project,
    parse_project,
    parse_scenario,
    payoff_to_dict,
    solve_result_to_dict,
)
from .fuzzy_solver import solve_max_lambda
from .objectives import payoff_matrix


@dataclass(frozen=True)
class ProjectHandle:
    """One uploaded project: opaque id, parsed document, creation time."""

    id: str
    document: ProjectDocument
    created_at: float


def _json(status: int, payload: Any) -> Response:
    return Response(canonical_json(payload), status_code=status,
                    media_type="application/json")


def _problem(status: int, message: str, violations=()) -> Response:
    return _json(status, {"error": message, "violations": list(violations)})


def create_app(project_dir: str | None = None) -> FastAPI:
    """Build the service; optionally preload every *.json under project_dir.

    Preloaded projects are addressable by file stem. A broken file fails
    startup loudly rather than serving a partial catalog.
    """
    store: dict[str, ProjectHandle] = {}
    lock = threading.Lock()
    ticket = itertools.count(1)

    if project_dir is not None:
        root = Path(project_dir)
        if not root.is_dir():
            raise ProjectFileError(f"{project_dir}: not a directory")
        for path in sorted(root.glob("*.json")):
            store[path.stem] = ProjectHandle(
                path.stem, load_project(path), time.time())

    app = FastAPI(title="pmfuzz scenario service", version=__version__)
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    def fetch(project_id: str) -> ProjectHandle | None:
        with lock:
            return store.get(project_id)

    @app.get("/healthz")
    def healthz() -> Response:
        return Response("ok", media_type="text/plain")

    @app.post("/api/projects")
    async def upload_project(request: Request) -> Response:
        text = (await request.body()).decode("utf-8", errors="replace")
        try:
            document = parse_project(text, "request body")
        except ProjectFileError as exc:
            return _problem(422, str(exc), exc.violations)
        with lock:
            project_id = f"p{next(ticket)}"
            while project_id in store:   # dodge preloaded stems
                project_id = f"p{next(ticket)}"
            store[project_id] = ProjectHandle(project_id, document, time.time())
        return _json(201, {"id": project_id})

    @app.get("/api/projects/{project_id}/payoff")
    async def project_payoff(project_id: str) -> Response:
        handle = fetch(project_id)
        if handle is None:
            return _problem(404, f"no project {project_id!r}")
        document = handle.document
        matrix = await run_in_threadpool(
            payoff_matrix, document.network, document.coefficient_set)
        return _json(200, payoff_to_dict(matrix))

    @app.post("/api/projects/{project_id}/solve")
    async def solve_project(project_id: str, request: Request) -> Response:
        handle = fetch(project_id)
        if handle is None:
            return _problem(404, f"no project {project_id!r}")
        text = (await request.body()).decode("utf-8", errors="replace")
        try:
            sdoc = parse_scenario(text, "request body")
        except ScenarioFileError as exc:
            return _problem(422, str(exc), exc.violations)
        document = handle.document
        coefficient_set = sdoc.coefficient_set or document.coefficient_set
        try:
            result = await run_in_threadpool(
                solve_max_lambda, document.network, None, sdoc.scenario,
                coefficient_set=coefficient_set)
        except ScenarioValidationError as exc:
            return _problem(422, str(exc), [str(exc)])
        except InfeasibleScenario as exc:
            return _problem(409, str(exc))
        return _json(200, solve_result_to_dict(result))

    return app
