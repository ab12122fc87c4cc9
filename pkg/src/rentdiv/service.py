"""HTTP facade: solve, verify, and drive elicitation sessions.

Bodies and responses are the JSON documents of the wire module; every solve
response embeds the freshly recomputed optimality certificate, so the
service never returns an uncertified allocation. Sessions live in a
pluggable key-value store; the default is in-memory and a file-backed store
is available for persistence across restarts.
"""

from __future__ import annotations

import json
import os
import threading
from typing import Optional, Protocol

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .elicitation import ElicitationError, Session, new_session
from .model import AllocationMismatch, ModelError, envy_witness, maxmin_certificate
from .solver import (
    MAXMIN_RENT,
    MAXMIN_UTILITY,
    MINMAX_RENT,
    MINMAX_UTILITY,
    Objective,
    SolverError,
    objective_value,
    selection_certificate,
    solve,
)
from .wire import (
    DocumentError,
    format_rational,
    parse_allocation,
    parse_economy,
    parse_rational,
    serialize_allocation,
    serialize_economy,
)

OBJECTIVE_NAMES = {
    "maxmin-utility": MAXMIN_UTILITY,
    "maxmin-rent": MAXMIN_RENT,
    "minmax-utility": MINMAX_UTILITY,
    "minmax-rent": MINMAX_RENT,
}


class ServiceError(Exception):
    def __init__(self, code: str, message: str, status: int = 400, detail=None):
        super().__init__(message)
        self.code = code
        self.message = message
        self.status = status
        self.detail = detail


class SessionStore(Protocol):
    def load(self, session_id: str) -> Optional[Session]: ...

    def save(self, session: Session) -> None: ...


class InMemorySessionStore:
    def __init__(self):
        self._sessions = {}
        self._lock = threading.Lock()

    def load(self, session_id):
        with self._lock:
            doc = self._sessions.get(session_id)
        return None if doc is None else Session.from_json_dict(doc)

    def save(self, session):
        with self._lock:
            self._sessions[session.session_id] = session.to_json_dict()


class FileSessionStore:
    """One JSON file per session under `root`."""

    def __init__(self, root: str):
        self.root = root
        os.makedirs(root, exist_ok=True)
        self._lock = threading.Lock()

    def _path(self, session_id: str) -> str:
        safe = "".join(c for c in session_id if c.isalnum())
        return os.path.join(self.root, f"{safe}.json")

    def load(self, session_id):
        path = self._path(session_id)
        with self._lock:
            if not os.path.exists(path):
                return None
            with open(path) as fh:
                return Session.from_json_dict(json.load(fh))

    def save(self, session):
        path = self._path(session.session_id)
        with self._lock:
            tmp = path + ".tmp"
            with open(tmp, "w") as fh:
                json.dump(session.to_json_dict(), fh)
            os.replace(tmp, path)


def parse_objective(doc) -> Objective:
    if doc is None:
        return Objective(MAXMIN_UTILITY)
    if isinstance(doc, str):
        name = doc
        transform = None
    else:
        name = doc.get("kind", "maxmin-utility")
        transform = doc.get("transform")
    if name not in OBJECTIVE_NAMES:
        raise ServiceError("objective_invalid", f"unknown objective {name!r}")
    fixed = None
    if transform is not None:
        fixed = {
            room: (parse_rational(ab[0]), parse_rational(ab[1]))
            for room, ab in transform.items()
        }
    try:
        return Objective(OBJECTIVE_NAMES[name], fixed)
    except SolverError as exc:
        raise ServiceError("objective_invalid", str(exc))


def solve_response(e, objective: Objective, with_trace: bool) -> dict:
    result = solve(e, objective)
    body = {
        "allocation": serialize_allocation(result.allocation),
        "objective_value": format_rational(result.value),
        "certificate": result.certificate.to_json_dict(),
        "utilities": {
            i: format_rational(
                e.utility(i, result.allocation.rent_of(i), result.allocation.room_of(i))
            )
            for i in e.agents
        },
    }
    if with_trace:
        body["trace"] = result.trace.to_json_dict()
    return body


def create_app(store: Optional[SessionStore] = None) -> FastAPI:
    app = FastAPI(title="rentdiv", version="0.1.0")
    sessions: SessionStore = store if store is not None else InMemorySessionStore()

    @app.exception_handler(ServiceError)
    async def service_error(_request: Request, exc: ServiceError):
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "message": exc.message, "detail": exc.detail},
        )

    def _lift(exc) -> ServiceError:
        if isinstance(exc, DocumentError):
            return ServiceError(exc.code, exc.message)
        if isinstance(exc, ElicitationError):
            status = 404 if exc.code == "session_not_found" else 400
            return ServiceError(exc.code, exc.message, status)
        if isinstance(exc, AllocationMismatch):
            return ServiceError("allocation_mismatch", str(exc))
        if isinstance(exc, (ModelError, SolverError)):
            return ServiceError("economy_invalid", str(exc))
        return ServiceError("internal_invariant", str(exc), status=500)

    def _session(session_id: str) -> Session:
        session = sessions.load(session_id)
        if session is None:
            raise ServiceError("session_not_found", f"no session {session_id!r}", 404)
        return session

    @app.post("/v1/solve")
    async def post_solve(body: dict):
        try:
            e = parse_economy(body.get("economy"))
            objective = parse_objective(body.get("objective"))
            return solve_response(e, objective, bool(body.get("trace")))
        except ServiceError:
            raise
        except Exception as exc:
            raise _lift(exc)

    @app.post("/v1/verify")
    async def post_verify(body: dict):
        try:
            e = parse_economy(body.get("economy"))
            z = parse_allocation(body.get("allocation"))
            witness = envy_witness(e, z)
            cert = maxmin_certificate(e.with_total(z.total()), z)
            return {
                "envy_free": witness is None,
                "witness": None
                if witness is None
                else {
                    "envious": witness.envious,
                    "envied": witness.envied,
                    "gap": format_rational(witness.gap),
                },
                "certificate": cert.to_json_dict(),
                "total": format_rational(z.total()),
            }
        except ServiceError:
            raise
        except Exception as exc:
            raise _lift(exc)

    @app.post("/v1/sessions")
    async def post_sessions(body: dict):
        try:
            session = new_session(
                agents=body["agents"],
                rooms=body["rooms"],
                total_rent=parse_rational(body["total_rent"]),
                rho_menu=[parse_rational(q) for q in body["rho_menu"]],
                rho_bar=parse_rational(body["rho_bar"]),
                case3_statistic=None
                if body.get("case3_statistic") is None
                else parse_rational(body["case3_statistic"]),
            )
            sessions.save(session)
            return {"session_id": session.session_id, "question": session.next_question().to_json_dict()}
        except KeyError as exc:
            raise ServiceError("session_invalid", f"missing field {exc.args[0]!r}")
        except ServiceError:
            raise
        except Exception as exc:
            raise _lift(exc)

    @app.get("/v1/sessions/{session_id}/question")
    async def get_question(session_id: str):
        session = _session(session_id)
        if session.done:
            return {"done": True, "question": None}
        try:
            return {"done": False, "question": session.next_question().to_json_dict()}
        except Exception as exc:
            raise _lift(exc)

    @app.post("/v1/sessions/{session_id}/answer")
    async def post_answer(session_id: str, body: dict):
        session = _session(session_id)
        try:
            next_q = session.submit_answer(body.get("payload", body), body.get("agent"))
        except Exception as exc:
            raise _lift(exc)
        sessions.save(session)
        return {
            "accepted": True,
            "done": session.done,
            "question": None if next_q is None else next_q.to_json_dict(),
        }

    @app.post("/v1/sessions/{session_id}/solve")
    async def post_session_solve(session_id: str, body: Optional[dict] = None):
        session = _session(session_id)
        body = body or {}
        try:
            e = session.build_economy()
            objective = parse_objective(body.get("objective"))
            response = solve_response(e, objective, bool(body.get("trace")))
            response["economy"] = serialize_economy(e)
            return response
        except ServiceError:
            raise
        except Exception as exc:
            raise _lift(exc)

    return app


app = create_app()
