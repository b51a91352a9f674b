"""Session-oriented HTTP API for incremental diagnosis.

A client loads a knowledge base once, opens a session against it, then
grows and shrinks the observation through atomic delta batches while
polling diagnosis reports.  Every report carries the revision of the
observation it was computed from, so a client can always tell stale
answers apart from current ones.

Sessions live in memory.  Passing a persistence path to ``create_app``
appends every accepted mutation to a JSONL file and replays it on the
next start, which is enough to survive restarts without a database.
"""

from __future__ import annotations

import argparse
import json
import secrets
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import kbio
from .core import KnowledgeBase, Observation
from .covers import CausalRelation, classify_covers
from .errors import DiagnosisError, TwofoldViolationError
from .fuzzy import explain_plausibility, rank_disorders, search_multi

SET = "set"
CLEAR = "clear"
PRESENT = "present"
ABSENT = "absent"


class _ApiError(Exception):
    """Carries an HTTP status and a DocumentIssue list to the handler."""

    def __init__(self, status: int, issues: list[kbio.DocumentIssue]):
        super().__init__(issues[0].message if issues else "")
        self.status = status
        self.issues = issues


def _fail(status: int, path: str, message: str) -> _ApiError:
    return _ApiError(status, [kbio.DocumentIssue(path, kbio.ERROR, message)])


def _issues_payload(issues: Iterable[kbio.DocumentIssue]) -> list[dict[str, str]]:
    return [
        {"path": i.path, "severity": i.severity, "message": i.message}
        for i in issues
    ]


# ---------------------------------------------------------------------------
# session state
# ---------------------------------------------------------------------------


@dataclass
class Session:
    """One diagnostic conversation: a KB plus an evolving observation."""

    id: str
    kb_id: str
    kb: KnowledgeBase
    observation: Observation
    revision: int = 0
    history: list[tuple[int, list[dict[str, Any]]]] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)


class Registry:
    """All loaded knowledge bases and open sessions, with optional replay."""

    def __init__(self, persist_path: str | Path | None = None):
        self._lock = threading.Lock()
        self._kbs: dict[str, KnowledgeBase] = {}
        self._sessions: dict[str, Session] = {}
        self._persist_path = Path(persist_path) if persist_path else None
        self._persist_lock = threading.Lock()
        if self._persist_path and self._persist_path.exists():
            self._replay()

    # -- persistence ----------------------------------------------------

    def _append(self, record: dict[str, Any]) -> None:
        if self._persist_path is None:
            return
        line = json.dumps(record, sort_keys=True, ensure_ascii=False)
        with self._persist_lock:
            with self._persist_path.open("a", encoding="utf-8") as fh:
                fh.write(line + "\n")

    def _replay(self) -> None:
        assert self._persist_path is not None
        with self._persist_path.open(encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                record = json.loads(line)
                kind = record.get("type")
                if kind == "kb":
                    kb, _ = kbio.parse_kb(json.dumps(record["document"]))
                    if kb is not None:
                        self._kbs[record["kb_id"]] = kb
                elif kind == "session":
                    kb = self._kbs.get(record["kb_id"])
                    if kb is None:
                        continue
                    self._sessions[record["session_id"]] = Session(
                        id=record["session_id"],
                        kb_id=record["kb_id"],
                        kb=kb,
                        observation=Observation.empty(kb.scale, kb.manifestations),
                    )
                elif kind == "delta":
                    session = self._sessions.get(record["session_id"])
                    if session is None:
                        continue
                    # accepted once, so it must apply cleanly again
                    session.observation = apply_delta(
                        session.kb, session.observation, record["delta"]
                    )
                    session.revision = record["revision"]
                    session.history.append((record["revision"], record["delta"]))

    # -- knowledge bases -------------------------------------------------

    def add_kb(self, kb: KnowledgeBase) -> str:
        kb_id = secrets.token_hex(6)
        with self._lock:
            self._kbs[kb_id] = kb
        self._append(
            {
                "type": "kb",
                "kb_id": kb_id,
                "document": kbio.kb_to_json(kb),
            }
        )
        return kb_id

    def kb(self, kb_id: str) -> KnowledgeBase:
        with self._lock:
            kb = self._kbs.get(kb_id)
        if kb is None:
            raise _fail(404, "$.kb_id", f"unknown knowledge base '{kb_id}'")
        return kb

    # -- sessions ----------------------------------------------------------

    def open_session(self, kb_id: str) -> Session:
        kb = self.kb(kb_id)
        session = Session(
            id=secrets.token_hex(6),
            kb_id=kb_id,
            kb=kb,
            observation=Observation.empty(kb.scale, kb.manifestations),
        )
        with self._lock:
            self._sessions[session.id] = session
        self._append({"type": "session", "session_id": session.id, "kb_id": kb_id})
        return session

    def session(self, session_id: str) -> Session:
        with self._lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise _fail(404, "$.session_id", f"unknown session '{session_id}'")
        return session

    def record_delta(self, session: Session, delta: list[dict[str, Any]]) -> None:
        self._append(
            {
                "type": "delta",
                "session_id": session.id,
                "revision": session.revision,
                "delta": delta,
            }
        )


# ---------------------------------------------------------------------------
# delta application
# ---------------------------------------------------------------------------


def _normalize_delta(raw: Any) -> list[dict[str, Any]]:
    if not isinstance(raw, list) or not raw:
        raise _fail(422, "$.delta", "delta must be a non-empty array of actions")
    items: list[dict[str, Any]] = []
    for idx, item in enumerate(raw):
        path = f"$.delta[{idx}]"
        if not isinstance(item, dict):
            raise _fail(422, path, "each action must be an object")
        action = item.get("action")
        if action not in (SET, CLEAR):
            raise _fail(422, f"{path}.action", "action must be 'set' or 'clear'")
        manifestation = item.get("manifestation")
        if not isinstance(manifestation, str) or not manifestation:
            raise _fail(422, f"{path}.manifestation", "manifestation is required")
        state = item.get("state")
        if state not in (PRESENT, ABSENT):
            raise _fail(422, f"{path}.state", "state must be 'present' or 'absent'")
        entry: dict[str, Any] = {
            "action": action,
            "manifestation": manifestation,
            "state": state,
        }
        if action == SET:
            if "level" not in item:
                raise _fail(422, f"{path}.level", "set actions need a level")
            try:
                level = kbio.parse_level(item["level"])
            except ValueError as exc:
                raise _fail(422, f"{path}.level", str(exc)) from None
            entry["level"] = kbio.level_to_str(level)
        items.append(entry)
    return items


def apply_delta(
    kb: KnowledgeBase, obs: Observation, delta: Iterable[Mapping[str, Any]]
) -> Observation:
    """Apply a whole batch and build the resulting observation.

    All-or-nothing: any invalid action or a present/absent clash in the
    combined result leaves the input observation untouched.
    """
    sides = {
        PRESENT: dict(obs.present.grades),
        ABSENT: dict(obs.absent.grades),
    }
    for item in delta:
        name = item["manifestation"]
        if name not in kb.manifestations:
            raise _fail(
                422, "$.delta", f"unknown manifestation '{name}'"
            )
        side = sides[item["state"]]
        if item["action"] == SET:
            level = kbio.parse_level(item["level"])
            if level not in kb.scale:
                raise _fail(
                    422,
                    "$.delta",
                    f"level {kbio.level_to_str(level)} is not on the scale",
                )
            if level == 0:
                side.pop(name, None)
            else:
                side[name] = level
        else:
            side.pop(name, None)
    try:
        return kb.observation(present=sides[PRESENT], absent=sides[ABSENT])
    except TwofoldViolationError as exc:
        issues = [
            kbio.DocumentIssue(
                "$.delta",
                kbio.ERROR,
                (
                    f"'{c.manifestation}' would be present at "
                    f"{kbio.level_to_str(c.positive)} and absent at "
                    f"{kbio.level_to_str(c.negative)}"
                ),
            )
            for c in exc.conflicts
        ]
        raise _ApiError(409, issues) from None


# ---------------------------------------------------------------------------
# report payloads
# ---------------------------------------------------------------------------


def _level(value) -> str:
    return kbio.level_to_str(value)


def _scale_payload(kb: KnowledgeBase) -> list[str]:
    return [_level(x) for x in kb.scale.levels]


def _kb_payload(kb_id: str, kb: KnowledgeBase) -> dict[str, Any]:
    return {
        "kb_id": kb_id,
        "summary": {
            "disorders": len(kb.disorders()),
            "manifestations": len(kb.manifestations),
            "scale_levels": len(kb.scale),
        },
        "disorder_names": sorted(kb.disorders()),
        "manifestation_names": list(kb.manifestations),
        "scale": _scale_payload(kb),
        "composition": kb.composition,
    }


def _observation_payload(obs: Observation) -> dict[str, dict[str, str]]:
    return {
        "present": {m: _level(g) for m, g in sorted(obs.present.grades.items())},
        "absent": {m: _level(g) for m, g in sorted(obs.absent.grades.items())},
    }


def _conflicts_payload(conflicts) -> list[dict[str, str]]:
    return [
        {
            "manifestation": c.manifestation,
            "term": c.term,
            "profile_level": _level(c.profile_level),
            "observed_level": _level(c.observed_level),
            "overlap": _level(c.overlap),
        }
        for c in conflicts
    ]


def _ranking_payload(
    kb: KnowledgeBase, obs: Observation, ranking
) -> dict[str, Any]:
    entries = []
    for entry in ranking.entries:
        breakdown = explain_plausibility(kb, obs, entry.disorders)
        entries.append(
            {
                "disorders": list(entry.disorders),
                "cardinality": entry.cardinality,
                "level": _level(entry.level),
                "certain_vs_absent": _level(breakdown.certain_vs_absent),
                "excluded_vs_present": _level(breakdown.excluded_vs_present),
                "conflicts": _conflicts_payload(breakdown.conflicts),
            }
        )
    return {
        "kind": "ranking",
        "scale": _scale_payload(kb),
        "entries": entries,
    }


def _covers_payload(kb: KnowledgeBase, obs: Observation, max_card: int | None) -> dict[str, Any]:
    rel = CausalRelation.from_kb(kb)
    reports = classify_covers(rel, obs.present.support(), max_card=max_card)
    return {
        "kind": "covers",
        "target": sorted(obs.present.support()),
        "reports": [
            {
                "subset": list(r.subset),
                "cardinality": r.cardinality,
                "is_cover": r.is_cover,
                "relevant": r.relevant,
                "irredundant": r.irredundant,
                "minimum": r.minimum,
            }
            for r in reports
        ],
    }


# ---------------------------------------------------------------------------
# application factory
# ---------------------------------------------------------------------------


def create_app(persist_path: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="abdiag service", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    registry = Registry(persist_path)
    app.state.registry = registry

    @app.exception_handler(_ApiError)
    async def handle_api_error(_request: Request, exc: _ApiError) -> JSONResponse:
        return JSONResponse(
            status_code=exc.status, content={"issues": _issues_payload(exc.issues)}
        )

    async def read_json_body(request: Request) -> Any:
        raw = await request.body()
        value, issues = kbio.parse_document(raw.decode("utf-8", errors="replace"))
        if issues:
            raise _ApiError(422, issues)
        return value

    @app.get("/healthz")
    def healthz() -> dict[str, str]:
        return {"status": "ok"}

    @app.post("/kb", status_code=201)
    async def post_kb(request: Request) -> JSONResponse:
        raw = await request.body()
        kb, issues = kbio.parse_kb(raw.decode("utf-8", errors="replace"))
        if kb is None:
            return JSONResponse(
                status_code=422, content={"issues": _issues_payload(issues)}
            )
        kb_id = registry.add_kb(kb)
        payload = _kb_payload(kb_id, kb)
        payload["issues"] = _issues_payload(issues)
        return JSONResponse(status_code=201, content=payload)

    @app.post("/sessions", status_code=201)
    async def post_session(request: Request) -> JSONResponse:
        body = await read_json_body(request)
        if not isinstance(body, dict):
            raise _fail(422, "$", "body must be an object")
        if "kb_id" in body:
            kb_id = body["kb_id"]
            if not isinstance(kb_id, str):
                raise _fail(422, "$.kb_id", "kb_id must be a string")
            kb = registry.kb(kb_id)
        elif "kb" in body:
            # floats were decoded to rationals; stringify them back losslessly
            kb, issues = kbio.parse_kb(json.dumps(body["kb"], default=kbio.level_to_str))
            if kb is None:
                return JSONResponse(
                    status_code=422, content={"issues": _issues_payload(issues)}
                )
            kb_id = registry.add_kb(kb)
        else:
            raise _fail(422, "$", "provide kb_id or an inline kb document")
        session = registry.open_session(kb_id)
        payload = _kb_payload(kb_id, kb)
        payload.update(
            {
                "session_id": session.id,
                "revision": session.revision,
                "observation": _observation_payload(session.observation),
            }
        )
        return JSONResponse(status_code=201, content=payload)

    @app.patch("/sessions/{session_id}/observation")
    async def patch_observation(session_id: str, request: Request) -> dict[str, Any]:
        session = registry.session(session_id)
        body = await read_json_body(request)
        if not isinstance(body, dict):
            raise _fail(422, "$", "body must be an object")
        delta = _normalize_delta(body.get("delta"))
        with session.lock:
            session.observation = apply_delta(session.kb, session.observation, delta)
            session.revision += 1
            session.history.append((session.revision, delta))
            registry.record_delta(session, delta)
            return {
                "session_id": session.id,
                "revision": session.revision,
                "observation": _observation_payload(session.observation),
            }

    @app.get("/sessions/{session_id}/diagnosis")
    def get_diagnosis(
        session_id: str,
        mode: str = "single",
        max_card: int | None = None,
        threshold: str | None = None,
    ) -> dict[str, Any]:
        session = registry.session(session_id)
        with session.lock:
            obs = session.observation
            revision = session.revision
        kb = session.kb
        if mode == "single":
            report = _ranking_payload(kb, obs, rank_disorders(kb, obs))
        elif mode == "multi":
            if max_card is None or max_card < 1:
                raise _fail(422, "$.max_card", "multi mode needs max_card >= 1")
            if threshold is None:
                level = kb.scale.top
            else:
                try:
                    level = kbio.parse_level(threshold)
                except ValueError as exc:
                    raise _fail(422, "$.threshold", str(exc)) from None
            try:
                ranking = search_multi(kb, obs, threshold=level, max_card=max_card)
            except DiagnosisError as exc:
                raise _fail(422, "$.threshold", str(exc)) from None
            report = _ranking_payload(kb, obs, ranking)
        elif mode == "covers":
            if max_card is not None and max_card < 0:
                raise _fail(422, "$.max_card", "max_card must be at least 0")
            report = _covers_payload(kb, obs, max_card)
        else:
            raise _fail(422, "$.mode", "mode must be single, multi or covers")
        return {
            "session_id": session.id,
            "revision": revision,
            "mode": mode,
            "report": report,
        }

    @app.get("/sessions/{session_id}/history")
    def get_history(session_id: str) -> dict[str, Any]:
        session = registry.session(session_id)
        with session.lock:
            entries = [
                {"revision": rev, "delta": delta} for rev, delta in session.history
            ]
            revision = session.revision
        return {
            "session_id": session.id,
            "revision": revision,
            "entries": entries,
        }

    return app


def serve() -> None:
    parser = argparse.ArgumentParser(
        prog="abdiag-service", description="Run the diagnosis HTTP service."
    )
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--persist", help="JSONL replay log for sessions")
    args = parser.parse_args()
    import uvicorn

    uvicorn.run(create_app(args.persist), host=args.host, port=args.port)


if __name__ == "__main__":
    serve()
