"""Domain types for the QA-based reply workflow.

All types are plain dataclasses with canonical JSON dict forms. Question
dicts keep the wire field names "id", "question", "choices",
"corresponding_part" that the model is instructed to emit.

Character offsets everywhere are Unicode code point indices into
``EmailMessage.body`` — the body is the anchor space and must never be
rewritten once a session references it.
"""

from __future__ import annotations

import datetime as dt
import enum
from dataclasses import dataclass, field, replace

from .anchoring import AnchorMode, AnchorSpan, resolve_anchor
from .errors import (
    DuplicateId,
    EmptyQuestionText,
    TooManyQuestions,
    ValidationIssue,
)

DEFAULT_QUESTION_CAP = 10
DEFAULT_OTHER_PATTERNS = ("other", "その他")


def _parse_ts(value: str | None) -> dt.datetime | None:
    return dt.datetime.fromisoformat(value) if value else None


def _dump_ts(value: dt.datetime | None) -> str | None:
    return value.isoformat() if value else None


@dataclass(frozen=True)
class EmailMessage:
    subject: str
    sender_name: str
    sender_address: str
    body: str
    thread: tuple["EmailMessage", ...] = ()
    received_at: dt.datetime | None = None

    def to_dict(self) -> dict:
        return {
            "subject": self.subject,
            "sender_name": self.sender_name,
            "sender_address": self.sender_address,
            "body": self.body,
            "thread": [m.to_dict() for m in self.thread],
            "received_at": _dump_ts(self.received_at),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EmailMessage":
        return cls(
            subject=d["subject"],
            sender_name=d["sender_name"],
            sender_address=d["sender_address"],
            body=d["body"],
            thread=tuple(cls.from_dict(m) for m in d.get("thread", [])),
            received_at=_parse_ts(d.get("received_at")),
        )


@dataclass(frozen=True)
class UserIdentity:
    name: str
    address: str
    locale: str = "en"

    def to_dict(self) -> dict:
        return {"name": self.name, "address": self.address, "locale": self.locale}

    @classmethod
    def from_dict(cls, d: dict) -> "UserIdentity":
        return cls(name=d["name"], address=d["address"], locale=d.get("locale") or "en")


class QuestionFlag(enum.Enum):
    AMBIGUOUS_ANCHOR = "ambiguous_anchor"
    FUZZY_ANCHOR = "fuzzy_anchor"
    OTHER_LIKE_CHOICE = "other_like_choice"
    UNANCHORED = "unanchored"


@dataclass(frozen=True)
class Question:
    id: str
    question: str
    choices: tuple[str, ...]
    corresponding_part: str
    anchor: AnchorSpan | None = None
    flags: frozenset[QuestionFlag] = frozenset()

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "question": self.question,
            "choices": list(self.choices),
            "corresponding_part": self.corresponding_part,
            "anchor": self.anchor.to_dict() if self.anchor else None,
            "flags": sorted(f.value for f in self.flags),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Question":
        anchor = d.get("anchor")
        return cls(
            id=str(d["id"]),
            question=d["question"],
            choices=tuple(d.get("choices") or ()),
            corresponding_part=d.get("corresponding_part", ""),
            anchor=AnchorSpan.from_dict(anchor) if anchor else None,
            flags=frozenset(QuestionFlag(f) for f in d.get("flags", [])),
        )


class QuestionSource(enum.Enum):
    LIVE_LLM = "live-llm"
    MOCK = "mock"
    IMPORTED = "imported"


@dataclass(frozen=True)
class QuestionSet:
    questions: tuple[Question, ...]
    source: QuestionSource = QuestionSource.IMPORTED
    raw_response: str = ""

    def get(self, question_id: str) -> Question | None:
        for q in self.questions:
            if q.id == question_id:
                return q
        return None

    def to_dict(self) -> dict:
        return {
            "questions": [q.to_dict() for q in self.questions],
            "source": self.source.value,
            "raw_response": self.raw_response,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "QuestionSet":
        return cls(
            questions=tuple(Question.from_dict(q) for q in d.get("questions", [])),
            source=QuestionSource(d.get("source", "imported")),
            raw_response=d.get("raw_response", ""),
        )


@dataclass(frozen=True)
class Answer:
    question_id: str
    selected: frozenset[int] = frozenset()
    custom_options: tuple[str, ...] = ()
    skipped: bool = False

    def __post_init__(self):
        if self.skipped and (self.selected or self.custom_options):
            raise ValueError("a skipped answer carries no selections or options")

    @property
    def answered(self) -> bool:
        return not self.skipped and bool(self.selected or self.custom_options)

    def to_dict(self) -> dict:
        return {
            "question_id": self.question_id,
            "selected": sorted(self.selected),
            "custom_options": list(self.custom_options),
            "skipped": self.skipped,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Answer":
        return cls(
            question_id=str(d["question_id"]),
            selected=frozenset(int(i) for i in d.get("selected", [])),
            custom_options=tuple(d.get("custom_options", [])),
            skipped=bool(d.get("skipped", False)),
        )


@dataclass(frozen=True)
class AnswerSet:
    answers: tuple[Answer, ...] = ()

    def get(self, question_id: str) -> Answer | None:
        for a in self.answers:
            if a.question_id == question_id:
                return a
        return None

    def to_dict(self) -> dict:
        return {"answers": [a.to_dict() for a in self.answers]}

    @classmethod
    def from_dict(cls, d: dict) -> "AnswerSet":
        return cls(answers=tuple(Answer.from_dict(a) for a in d.get("answers", [])))


class Formality(enum.Enum):
    CASUAL = "casual"
    NEUTRAL = "neutral"
    FORMAL = "formal"


class Tone(enum.Enum):
    FRIENDLY = "friendly"
    NEUTRAL = "neutral"
    APOLOGETIC = "apologetic"
    ASSERTIVE = "assertive"


class ReplyLength(enum.Enum):
    SHORT = "short"
    MEDIUM = "medium"
    LONG = "long"


@dataclass(frozen=True)
class ReplyPreferences:
    relationship: str = ""
    formality: Formality = Formality.NEUTRAL
    tone: Tone = Tone.NEUTRAL
    length: ReplyLength = ReplyLength.MEDIUM
    free_instruction: str = ""

    def to_dict(self) -> dict:
        return {
            "relationship": self.relationship,
            "formality": self.formality.value,
            "tone": self.tone.value,
            "length": self.length.value,
            "free_instruction": self.free_instruction,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ReplyPreferences":
        return cls(
            relationship=d.get("relationship", ""),
            formality=Formality(d.get("formality", "neutral")),
            tone=Tone(d.get("tone", "neutral")),
            length=ReplyLength(d.get("length", "medium")),
            free_instruction=d.get("free_instruction", ""),
        )


@dataclass(frozen=True)
class DraftReply:
    text: str
    generation_index: int
    created_at: dt.datetime
    prompt_digest: str
    edited: bool = False

    def to_dict(self) -> dict:
        return {
            "text": self.text,
            "generation_index": self.generation_index,
            "created_at": _dump_ts(self.created_at),
            "prompt_digest": self.prompt_digest,
            "edited": self.edited,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DraftReply":
        return cls(
            text=d["text"],
            generation_index=int(d["generation_index"]),
            created_at=_parse_ts(d["created_at"]),
            prompt_digest=d["prompt_digest"],
            edited=bool(d.get("edited", False)),
        )


class SessionState(enum.Enum):
    CREATED = "created"
    QUESTIONED = "questioned"
    ANSWERED = "answered"
    DRAFTED = "drafted"
    FINALIZED = "finalized"


_STATE_ORDER = {s: i for i, s in enumerate(SessionState)}


@dataclass
class Session:
    """Mutable workflow state for one email reply.

    Mutations must happen only under the session service's per-session
    lock; everything a Session holds is otherwise an immutable value.
    """

    id: str
    email: EmailMessage
    user: UserIdentity
    question_set: QuestionSet | None = None
    answers: AnswerSet = field(default_factory=AnswerSet)
    preferences: ReplyPreferences = field(default_factory=ReplyPreferences)
    drafts: list[DraftReply] = field(default_factory=list)
    final_text: str | None = None
    opened_at: dt.datetime = field(
        default_factory=lambda: dt.datetime.now(dt.timezone.utc)
    )
    finalized_at: dt.datetime | None = None
    state: SessionState = SessionState.CREATED

    def advance(self, new_state: SessionState) -> None:
        """Move the workflow forward; backward transitions are rejected."""
        if _STATE_ORDER[new_state] < _STATE_ORDER[self.state]:
            from .errors import InvalidStateTransition

            raise InvalidStateTransition(
                f"cannot move from {self.state.value} back to {new_state.value}"
            )
        self.state = new_state

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "email": self.email.to_dict(),
            "user": self.user.to_dict(),
            "question_set": self.question_set.to_dict() if self.question_set else None,
            "answers": self.answers.to_dict(),
            "preferences": self.preferences.to_dict(),
            "drafts": [d.to_dict() for d in self.drafts],
            "final_text": self.final_text,
            "opened_at": _dump_ts(self.opened_at),
            "finalized_at": _dump_ts(self.finalized_at),
            "state": self.state.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Session":
        qs = d.get("question_set")
        return cls(
            id=d["id"],
            email=EmailMessage.from_dict(d["email"]),
            user=UserIdentity.from_dict(d["user"]),
            question_set=QuestionSet.from_dict(qs) if qs else None,
            answers=AnswerSet.from_dict(d.get("answers", {})),
            preferences=ReplyPreferences.from_dict(d.get("preferences", {})),
            drafts=[DraftReply.from_dict(x) for x in d.get("drafts", [])],
            final_text=d.get("final_text"),
            opened_at=_parse_ts(d["opened_at"]),
            finalized_at=_parse_ts(d.get("finalized_at")),
            state=SessionState(d.get("state", "created")),
        )


class Condition(enum.Enum):
    NO_AI = "no_ai"
    PROMPT_BASED = "prompt_based"
    QA_BASED = "qa_based"


@dataclass(frozen=True)
class MetricsRecord:
    final_char_count: int
    elapsed_seconds: float
    prompt_char_count: int
    condition: Condition

    def __post_init__(self):
        if self.final_char_count < 0 or self.prompt_char_count < 0:
            raise ValueError("counts must be non-negative")
        if self.elapsed_seconds <= 0:
            raise ValueError("elapsed_seconds must be positive")

    def to_dict(self) -> dict:
        return {
            "final_char_count": self.final_char_count,
            "elapsed_seconds": self.elapsed_seconds,
            "prompt_char_count": self.prompt_char_count,
            "condition": self.condition.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MetricsRecord":
        return cls(
            final_char_count=int(d["final_char_count"]),
            elapsed_seconds=float(d["elapsed_seconds"]),
            prompt_char_count=int(d["prompt_char_count"]),
            condition=Condition(d["condition"]),
        )


def _is_other_like(choice: str, patterns: tuple[str, ...]) -> bool:
    c = choice.strip().casefold()
    return any(c == p.casefold() for p in patterns)


def validate_question_set(
    raw: QuestionSet,
    email: EmailMessage,
    *,
    question_cap: int = DEFAULT_QUESTION_CAP,
    other_patterns: tuple[str, ...] = DEFAULT_OTHER_PATTERNS,
    fuzzy_threshold: float = 0.8,
) -> QuestionSet:
    """Resolve anchors and flag irregularities for every question.

    Anchor failures are flags, not errors: an unanchored question is still
    answerable, it just cannot be highlighted. Structural violations
    (duplicate ids, empty question text, over-cap count) raise.
    """
    if len(raw.questions) > question_cap:
        raise TooManyQuestions(len(raw.questions), question_cap)

    seen: set[str] = set()
    validated: list[Question] = []
    for q in raw.questions:
        if not q.id:
            raise EmptyQuestionText("")
        if q.id in seen:
            raise DuplicateId(q.id)
        seen.add(q.id)
        if not q.question.strip():
            raise EmptyQuestionText(q.id)

        flags = set(q.flags)
        anchor = q.anchor
        res = resolve_anchor(q.corresponding_part, email.body, fuzzy_threshold)
        if res.mode is AnchorMode.EXACT:
            anchor = res.span
            if res.occurrences > 1:
                flags.add(QuestionFlag.AMBIGUOUS_ANCHOR)
        elif res.mode in (AnchorMode.NORMALIZED, AnchorMode.FUZZY):
            anchor = res.span
            flags.add(QuestionFlag.FUZZY_ANCHOR)
        else:
            anchor = None
            flags.add(QuestionFlag.UNANCHORED)

        if any(_is_other_like(c, other_patterns) for c in q.choices):
            flags.add(QuestionFlag.OTHER_LIKE_CHOICE)

        validated.append(replace(q, anchor=anchor, flags=frozenset(flags)))

    return QuestionSet(
        questions=tuple(validated), source=raw.source, raw_response=raw.raw_response
    )


def check_answers(answers: AnswerSet, question_set: QuestionSet) -> None:
    """Referential integrity: ids must exist, indices must be in range."""
    from .errors import IndexOutOfRange, UnknownQuestionId

    for a in answers.answers:
        q = question_set.get(a.question_id)
        if q is None:
            raise UnknownQuestionId(a.question_id)
        for i in a.selected:
            if i < 0 or i >= len(q.choices):
                raise IndexOutOfRange(a.question_id, i, len(q.choices))


__all__ = [
    "AnchorSpan",
    "Answer",
    "AnswerSet",
    "Condition",
    "DraftReply",
    "EmailMessage",
    "Formality",
    "MetricsRecord",
    "Question",
    "QuestionFlag",
    "QuestionSet",
    "QuestionSource",
    "ReplyLength",
    "ReplyPreferences",
    "Session",
    "SessionState",
    "Tone",
    "UserIdentity",
    "ValidationIssue",
    "check_answers",
    "validate_question_set",
]
