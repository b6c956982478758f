"""HTTP session service: the surface the UI and CLI drive.

The store is ephemeral by default: sessions live in process memory only
and vanish on expiry or shutdown, so no mail content ever touches disk.
Log lines carry session-id prefixes and event names, never content.

An encrypted-file mode exists for offline CLI workflows; it writes
Fernet-encrypted session snapshots and is never the service default.
"""

from __future__ import annotations

import datetime as dt
import json
import logging
import secrets
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from fastapi import Body, FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import drafting
from .domain import (
    AnswerSet,
    Condition,
    MetricsRecord,
    ReplyPreferences,
    Session,
    SessionState,
    UserIdentity,
    check_answers,
)
from .errors import (
    AlreadyFinalized,
    EmptyFinalText,
    IngestError,
    NothingToSay,
    ProviderError,
    QAReplyError,
    SessionError,
    UnknownSession,
)
from .ingest import IngestConfig, parse_json_email
from .metrics import efficiency
from .questions import generate_questions

log = logging.getLogger("qareply.service")

DEFAULT_TTL_SECONDS = 86400


@dataclass
class _Entry:
    session: Session
    lock: threading.Lock = field(default_factory=threading.Lock)
    expires_at: float = 0.0


class SessionStore:
    """In-memory session map with TTL expiry and per-session locks."""

    def __init__(
        self,
        ttl_seconds: int = DEFAULT_TTL_SECONDS,
        now_fn: Callable[[], float] = time.monotonic,
    ):
        self.ttl_seconds = ttl_seconds
        self._now = now_fn
        self._entries: dict[str, _Entry] = {}
        self._lock = threading.Lock()

    @staticmethod
    def new_id() -> str:
        return secrets.token_urlsafe(32)  # 256 bits

    def put(self, session: Session) -> None:
        with self._lock:
            self._entries[session.id] = _Entry(
                session=session, expires_at=self._now() + self.ttl_seconds
            )

    def _entry(self, session_id: str) -> _Entry:
        with self._lock:
            entry = self._entries.get(session_id)
            if entry is None or entry.expires_at <= self._now():
                self._entries.pop(session_id, None)
                raise UnknownSession("no such session")
            return entry

    def get(self, session_id: str) -> Session:
        return self._entry(session_id).session

    def lock_for(self, session_id: str) -> threading.Lock:
        return self._entry(session_id).lock

    def purge_expired(self) -> int:
        now = self._now()
        with self._lock:
            dead = [k for k, e in self._entries.items() if e.expires_at <= now]
            for k in dead:
                del self._entries[k]
        return len(dead)

    def clear(self) -> None:
        with self._lock:
            self._entries.clear()

    def __len__(self) -> int:
        return len(self._entries)


class EncryptedFileStore(SessionStore):
    """Persists snapshots as Fernet-encrypted JSON, one file per session.

    For CLI offline workflows only; key material is the caller's problem.
    """

    def __init__(self, directory: Path, key: bytes, **kwargs):
        super().__init__(**kwargs)
        from cryptography.fernet import Fernet

        self._dir = Path(directory)
        self._dir.mkdir(parents=True, exist_ok=True)
        self._fernet = Fernet(key)

    def _path(self, session_id: str) -> Path:
        # session ids are urlsafe tokens, usable as filenames as-is
        return self._dir / f"{session_id}.qsession"

    def put(self, session: Session) -> None:
        super().put(session)
        self.save(session)

    def save(self, session: Session) -> None:
        blob = self._fernet.encrypt(
            json.dumps(session.to_dict(), ensure_ascii=False).encode("utf-8")
        )
        self._path(session.id).write_bytes(blob)

    def load(self, session_id: str) -> Session:
        path = self._path(session_id)
        if not path.exists():
            raise UnknownSession("no such session on disk")
        data = self._fernet.decrypt(path.read_bytes())
        session = Session.from_dict(json.loads(data.decode("utf-8")))
        super().put(session)
        return session


def _error_response(exc: Exception) -> JSONResponse:
    status = 500
    if isinstance(exc, UnknownSession):
        status = 404
    elif isinstance(exc, AlreadyFinalized):
        status = 409
    elif isinstance(exc, (IngestError, SessionError, NothingToSay, EmptyFinalText)):
        status = 400
    elif isinstance(exc, ProviderError):
        status = 502
    elif isinstance(exc, QAReplyError):
        status = 400
    return JSONResponse(
        status_code=status,
        content={"error": type(exc).__name__, "detail": str(exc)},
    )


def create_app(
    provider,
    store: SessionStore | None = None,
    *,
    cors_origins: tuple[str, ...] = ("*",),
    ingest_config: IngestConfig | None = None,
    question_cap: int = 10,
) -> FastAPI:
    store = store if store is not None else SessionStore()
    ingest_config = ingest_config or IngestConfig()
    app = FastAPI(title="qareply session service")
    app.state.store = store
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(QAReplyError)
    def _handle(request, exc):
        return _error_response(exc)

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/sessions", status_code=201)
    def create_session(payload: dict = Body(...)):
        store.purge_expired()
        if "email" not in payload:
            from .errors import MissingField

            raise MissingField("email")
        email = parse_json_email(payload["email"], ingest_config)
        user = UserIdentity.from_dict(payload.get("user") or {"name": "", "address": ""})
        session = Session(id=SessionStore.new_id(), email=email, user=user)
        provider_failed: str | None = None
        try:
            session.question_set = generate_questions(
                email, user, provider, question_cap=question_cap
            )
            session.advance(SessionState.QUESTIONED)
        except (ProviderError, QAReplyError) as exc:
            provider_failed = type(exc).__name__
        store.put(session)
        log.info("session %s created (%s)", session.id[:8], session.state.value)
        body = {
            "session_id": session.id,
            "state": session.state.value,
            "question_set": session.question_set.to_dict()
            if session.question_set
            else {"questions": [], "source": "imported", "raw_response": ""},
        }
        if provider_failed:
            body["error"] = provider_failed
            body["retry"] = f"/sessions/{session.id}/questions"
            return JSONResponse(status_code=502, content=body)
        return body

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        store.purge_expired()
        return store.get(session_id).to_dict()

    @app.post("/sessions/{session_id}/questions")
    def retry_questions(session_id: str):
        with store.lock_for(session_id):
            session = store.get(session_id)
            session.question_set = generate_questions(
                session.email, session.user, provider, question_cap=question_cap
            )
            session.advance(SessionState.QUESTIONED)
            log.info("session %s questions generated", session.id[:8])
            return session.question_set.to_dict()

    @app.post("/sessions/{session_id}/answers")
    def submit_answers(session_id: str, payload: dict = Body(...)):
        with store.lock_for(session_id):
            session = store.get(session_id)
            _require_not_finalized(session)
            answers = AnswerSet.from_dict(payload)
            if session.question_set is None:
                raise NothingToSay("no questions generated yet")
            check_answers(answers, session.question_set)
            session.answers = answers
            if session.state in (SessionState.CREATED, SessionState.QUESTIONED):
                session.advance(SessionState.ANSWERED)
            log.info("session %s answers stored (%d)", session.id[:8],
                     len(answers.answers))
            return _summary(session)

    @app.post("/sessions/{session_id}/preferences")
    def set_preferences(session_id: str, payload: dict = Body(...)):
        with store.lock_for(session_id):
            session = store.get(session_id)
            _require_not_finalized(session)
            try:
                session.preferences = ReplyPreferences.from_dict(payload)
            except ValueError as exc:
                from .errors import WrongType

                raise WrongType("preferences", f"valid enum values ({exc})")
            log.info("session %s preferences set", session.id[:8])
            return {"ok": True}

    def _draft(session_id: str):
        with store.lock_for(session_id):
            session = store.get(session_id)
            _require_not_finalized(session)
            draft = drafting.generate_draft(session, provider)
            log.info("session %s draft %d generated", session.id[:8],
                     draft.generation_index)
            return draft.to_dict()

    @app.post("/sessions/{session_id}/draft")
    def generate_draft_endpoint(session_id: str):
        return _draft(session_id)

    @app.post("/sessions/{session_id}/draft/regenerate")
    def regenerate(session_id: str):
        return _draft(session_id)

    @app.post("/sessions/{session_id}/finalize")
    def finalize(session_id: str, payload: dict = Body(...)):
        with store.lock_for(session_id):
            session = store.get(session_id)
            _require_not_finalized(session)
            final_text = payload.get("final_text", "")
            if not final_text:
                raise EmptyFinalText("final_text must be non-empty")
            session.final_text = final_text
            session.finalized_at = dt.datetime.now(dt.timezone.utc)
            session.advance(SessionState.FINALIZED)
            elapsed = max(
                (session.finalized_at - session.opened_at).total_seconds(), 1e-9
            )
            typed = len(session.preferences.free_instruction) + sum(
                len(t) for a in session.answers.answers for t in a.custom_options
            )
            record = MetricsRecord(
                final_char_count=len(final_text),
                elapsed_seconds=elapsed,
                prompt_char_count=typed,
                condition=Condition.QA_BASED,
            )
            log.info("session %s finalized", session.id[:8])
            out = record.to_dict()
            out["chars_per_second"] = efficiency(
                record.final_char_count, record.elapsed_seconds
            )
            return out

    return app


def _require_not_finalized(session: Session) -> None:
    if session.state is SessionState.FINALIZED:
        raise AlreadyFinalized("session is finalized")


def _summary(session: Session) -> dict:
    return {
        "session_id": session.id,
        "state": session.state.value,
        "answer_count": len(session.answers.answers),
        "draft_count": len(session.drafts),
    }
