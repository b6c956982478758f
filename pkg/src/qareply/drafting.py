"""Draft generation: transcript rendering, prompt assembly, history.

The draft prompt opens with the fixed directive sentence, then carries the
incoming mail, the question/answer transcript, the reply preferences, and
the user identity for the signature. Assembly is deterministic, so any
preference change shows up in the prompt digest.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass

from .domain import DraftReply, Question, Session, SessionState
from .errors import NoDraft, NothingToSay, ProviderError
from .questions import (
    MAIL_FOOTER,
    MAIL_HEADER,
    THREAD_HEADER,
    PromptKind,
    PromptText,
)

DRAFT_DIRECTIVE = (
    "Please provide a draft reply to the sender of this email on behalf of the user."
)

QA_HEADER = "###Questions and Answers###"
PREFS_HEADER = "###Reply Preferences###"
USER_HEADER = "###User (for the signature)###"

DEFAULT_REGENERATION_LIMIT = 10


@dataclass(frozen=True)
class TranscriptEntry:
    question: str
    corresponding_part: str
    answer: str


@dataclass(frozen=True)
class QATranscript:
    entries: tuple[TranscriptEntry, ...]
    unanswered: tuple[str, ...]  # question ids skipped or left blank


def render_answer(question: Question, selected: frozenset[int], custom: tuple[str, ...]) -> str:
    parts = [question.choices[i] for i in sorted(selected)]
    parts.extend(custom)
    return ", ".join(parts)


def build_transcript(session: Session) -> QATranscript:
    """Entries for answered questions in question order; the rest skipped."""
    if session.question_set is None:
        return QATranscript(entries=(), unanswered=())
    entries: list[TranscriptEntry] = []
    unanswered: list[str] = []
    for q in session.question_set.questions:
        a = session.answers.get(q.id)
        if a is None or not a.answered:
            unanswered.append(q.id)
            continue
        entries.append(
            TranscriptEntry(
                question=q.question,
                corresponding_part=q.corresponding_part,
                answer=render_answer(q, a.selected, a.custom_options),
            )
        )
    return QATranscript(entries=tuple(entries), unanswered=tuple(unanswered))


def build_draft_prompt(session: Session) -> PromptText:
    transcript = build_transcript(session)
    prefs = session.preferences
    if not transcript.entries and not prefs.free_instruction.strip():
        raise NothingToSay("no answered questions and no free instruction")

    email = session.email
    lines = [
        DRAFT_DIRECTIVE,
        "",
        MAIL_HEADER,
        f"Subject: {email.subject}",
        f"From: {email.sender_name} <{email.sender_address}>",
        email.body,
        MAIL_FOOTER,
    ]
    if email.thread:
        lines.append("")
        lines.append(THREAD_HEADER)
        for i, prior in enumerate(email.thread, start=1):
            lines.append(f"--- message {i} ---")
            lines.append(f"Subject: {prior.subject}")
            lines.append(f"From: {prior.sender_name} <{prior.sender_address}>")
            lines.append(prior.body)

    lines.append("")
    lines.append(QA_HEADER)
    for e in transcript.entries:
        lines.append(f"- {e.question} → {e.answer}")
        lines.append(f"  (quoting: {e.corresponding_part})")
    if not transcript.entries:
        lines.append("(the user chose to answer no questions)")

    lines.append("")
    lines.append(PREFS_HEADER)
    if prefs.relationship.strip():
        lines.append(f"The sender is {prefs.relationship.strip()} to the user.")
    lines.append(f"Formality: {prefs.formality.value}")
    lines.append(f"Tone: {prefs.tone.value}")
    lines.append(f"Length: {prefs.length.value}")
    if prefs.free_instruction.strip():
        lines.append(f"Additional instruction: {prefs.free_instruction.strip()}")

    lines.append("")
    lines.append(USER_HEADER)
    lines.append(f"{session.user.name} <{session.user.address}>")

    return PromptText(text="\n".join(lines) + "\n", kind=PromptKind.DRAFT_GEN)


def parse_draft_response(raw: str) -> str:
    """Accept {"reply": "..."} or plain text; JSON wins when present."""
    try:
        obj = json.loads(raw)
    except ValueError:
        return raw.strip()
    if isinstance(obj, dict) and isinstance(obj.get("reply"), str):
        return obj["reply"]
    return raw.strip()


def generate_draft(
    session: Session,
    llm,
    *,
    max_attempts: int = 3,
    regeneration_limit: int = DEFAULT_REGENERATION_LIMIT,
) -> DraftReply:
    """Append a fresh draft; earlier drafts are never touched."""
    prompt = build_draft_prompt(session)
    if len(session.drafts) >= regeneration_limit:
        raise ProviderError(
            f"regeneration limit of {regeneration_limit} reached", attempts=0
        )
    last_error: ProviderError | None = None
    raw = None
    for _ in range(max_attempts):
        try:
            raw = llm.complete(prompt)
            break
        except ProviderError as exc:
            last_error = exc
    if raw is None:
        raise ProviderError(str(last_error), attempts=max_attempts)

    draft = DraftReply(
        text=parse_draft_response(raw),
        generation_index=max((d.generation_index for d in session.drafts), default=0) + 1,
        created_at=dt.datetime.now(dt.timezone.utc),
        prompt_digest=prompt.digest,
    )
    session.drafts.append(draft)
    session.advance(SessionState.DRAFTED)
    return draft


def apply_edit(session: Session, new_text: str) -> DraftReply:
    """Replace the latest draft's text in place; no new generation index."""
    if not session.drafts:
        raise NoDraft("no draft to edit")
    latest = session.drafts[-1]
    edited = DraftReply(
        text=new_text,
        generation_index=latest.generation_index,
        created_at=latest.created_at,
        prompt_digest=latest.prompt_digest,
        edited=True,
    )
    session.drafts[-1] = edited
    return edited
