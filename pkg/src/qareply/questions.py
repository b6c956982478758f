"""Question generation: prompt assembly, response parsing, validation.

The instruction block lives in ``prompts/question_instruction.txt`` and is
included bit-for-bit; everything after it is a deterministic context
section, so identical inputs always hash to the same prompt digest.
"""

from __future__ import annotations

import enum
import hashlib
import json
import re
from dataclasses import dataclass
from importlib import resources

from .domain import (
    EmailMessage,
    Question,
    QuestionSet,
    QuestionSource,
    UserIdentity,
    validate_question_set,
)
from .errors import EmptyBody, NoJsonFound, ProviderError, SchemaMismatch, ValidationIssue

CONTEXT_HEADER = "###Context###"
MAIL_HEADER = "###Incoming Mail###"
MAIL_FOOTER = "###End of Incoming Mail###"
THREAD_HEADER = "###Prior Messages (oldest first)###"


class PromptKind(enum.Enum):
    QUESTION_GEN = "question_gen"
    DRAFT_GEN = "draft_gen"


@dataclass(frozen=True)
class PromptText:
    text: str
    kind: PromptKind

    def __post_init__(self):
        if not self.text:
            raise ValueError("prompt text must be non-empty")

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.text.encode("utf-8")).hexdigest()


def question_instruction_text() -> str:
    """The vendored instruction block, byte-exact."""
    return (
        resources.files("qareply.prompts")
        .joinpath("question_instruction.txt")
        .read_text(encoding="utf-8")
    )


def _context_section(email: EmailMessage, user: UserIdentity) -> str:
    lines = [
        CONTEXT_HEADER,
        f"Subject: {email.subject}",
        f"From: {email.sender_name} <{email.sender_address}>",
        f"Audience (the user replying): {user.name} <{user.address}>",
        f"Audience language: {user.locale}",
        "",
        MAIL_HEADER,
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
    return "\n".join(lines)


def build_question_prompt(email: EmailMessage, user: UserIdentity) -> PromptText:
    """Instruction block verbatim, then the email and user context."""
    if not email.body:
        raise EmptyBody("cannot generate questions from an empty body")
    text = question_instruction_text() + "\n" + _context_section(email, user) + "\n"
    return PromptText(text=text, kind=PromptKind.QUESTION_GEN)


_FENCE = re.compile(r"```(?:json)?\s*(.*?)```", re.DOTALL)


def _candidate_json_objects(text: str):
    """Yield decodable JSON objects found in the text, fences first."""
    decoder = json.JSONDecoder()
    sources = [m.group(1) for m in _FENCE.finditer(text)]
    sources.append(text)
    for src in sources:
        tried = 0
        for pos, ch in enumerate(src):
            if ch != "{":
                continue
            tried += 1
            if tried > 500:  # pathological inputs: give up, not hang
                break
            try:
                obj, _ = decoder.raw_decode(src, pos)
            except ValueError:
                continue
            if isinstance(obj, dict):
                yield obj


def parse_llm_questions(response: str) -> QuestionSet:
    """Extract the first JSON object with a "questions" array.

    Tolerates surrounding prose and code fences; any structural problem in
    the object itself is a SchemaMismatch.
    """
    found_object = False
    for obj in _candidate_json_objects(response):
        found_object = True
        if "questions" not in obj:
            continue
        return _questions_from_obj(obj, response)
    if found_object:
        raise NoJsonFound("no JSON object with a 'questions' array in response")
    raise NoJsonFound("no JSON object found in response")


def _questions_from_obj(obj: dict, raw_response: str) -> QuestionSet:
    qs = obj["questions"]
    if not isinstance(qs, list):
        raise SchemaMismatch("'questions' must be an array")
    questions = []
    for item in qs:
        if not isinstance(item, dict):
            raise SchemaMismatch("each question must be an object")
        for key in ("id", "question", "corresponding_part"):
            if key not in item:
                raise SchemaMismatch(f"question missing field {key!r}")
        if not isinstance(item["question"], str):
            raise SchemaMismatch("'question' must be a string")
        if not isinstance(item["corresponding_part"], str):
            raise SchemaMismatch("'corresponding_part' must be a string")
        if not isinstance(item["id"], (str, int)):
            raise SchemaMismatch("'id' must be a string")
        choices = item.get("choices", [])
        if not isinstance(choices, list) or not all(
            isinstance(c, str) for c in choices
        ):
            raise SchemaMismatch("'choices' must be an array of strings")
        questions.append(
            Question(
                id=str(item["id"]),
                question=item["question"],
                choices=tuple(choices),
                corresponding_part=item["corresponding_part"],
            )
        )
    return QuestionSet(
        questions=tuple(questions),
        source=QuestionSource.IMPORTED,
        raw_response=raw_response,
    )


def generate_questions(
    email: EmailMessage,
    user: UserIdentity,
    llm,
    *,
    question_cap: int = 10,
    max_attempts: int = 3,
) -> QuestionSet:
    """Full pipeline: prompt, provider call, parse, validate, anchor.

    Malformed responses trigger a fresh provider call, up to max_attempts.
    Structural violations from validation (over-cap, duplicate ids) are
    not retried under a deterministic provider -- they still count as
    attempts for a live one.
    """
    prompt = build_question_prompt(email, user)
    last_error: Exception | None = None
    for attempt in range(1, max_attempts + 1):
        try:
            raw = llm.complete(prompt)
            parsed = parse_llm_questions(raw)
            validated = validate_question_set(parsed, email, question_cap=question_cap)
        except (NoJsonFound, SchemaMismatch, ValidationIssue) as exc:
            last_error = exc
            if llm.deterministic:
                raise
            continue
        except ProviderError as exc:
            last_error = exc
            continue
        source = QuestionSource.MOCK if llm.deterministic else QuestionSource.LIVE_LLM
        return QuestionSet(
            questions=validated.questions, source=source, raw_response=raw
        )
    if isinstance(last_error, ProviderError):
        last_error.attempts = max_attempts
    raise last_error  # type: ignore[misc]
