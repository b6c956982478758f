"""Exception hierarchy shared across the package.

Every failure a caller is expected to branch on gets its own class; the
HTTP layer and the CLI map them to status codes / exit codes by type.
"""

from __future__ import annotations


class QAReplyError(Exception):
    """Base class for all package errors."""


# --- ingest ---------------------------------------------------------------

class IngestError(QAReplyError):
    pass


class MalformedHeaders(IngestError):
    pass


class NoTextPart(IngestError):
    pass


class BodyTooLarge(IngestError):
    pass


class MissingField(IngestError):
    def __init__(self, field: str):
        super().__init__(f"missing required field: {field}")
        self.field = field


class WrongType(IngestError):
    def __init__(self, field: str, expected: str):
        super().__init__(f"field {field!r} must be {expected}")
        self.field = field
        self.expected = expected


# --- question / draft engines --------------------------------------------

class EmptyBody(QAReplyError):
    pass


class NoJsonFound(QAReplyError):
    pass


class SchemaMismatch(QAReplyError):
    pass


class ValidationIssue(QAReplyError):
    """Structural violation inside a question set."""


class DuplicateId(ValidationIssue):
    def __init__(self, question_id: str):
        super().__init__(f"duplicate question id: {question_id!r}")
        self.question_id = question_id


class EmptyQuestionText(ValidationIssue):
    def __init__(self, question_id: str):
        super().__init__(f"question {question_id!r} has empty text")
        self.question_id = question_id


class TooManyQuestions(ValidationIssue):
    def __init__(self, count: int, cap: int):
        super().__init__(f"{count} questions exceeds cap of {cap}")
        self.count = count
        self.cap = cap


class NothingToSay(QAReplyError):
    """No answered questions and no free-text instruction to draft from."""


class NoDraft(QAReplyError):
    pass


# --- provider -------------------------------------------------------------

class ProviderError(QAReplyError):
    def __init__(self, message: str, attempts: int = 1):
        super().__init__(message)
        self.attempts = attempts


class AuthError(ProviderError):
    pass


class RateLimited(ProviderError):
    pass


class ProviderTimeout(ProviderError):
    pass


class TransportError(ProviderError):
    pass


# --- session service ------------------------------------------------------

class SessionError(QAReplyError):
    pass


class UnknownSession(SessionError):
    pass


class UnknownQuestionId(SessionError):
    def __init__(self, question_id: str):
        super().__init__(f"unknown question id: {question_id!r}")
        self.question_id = question_id


class IndexOutOfRange(SessionError):
    def __init__(self, question_id: str, index: int, n_choices: int):
        super().__init__(
            f"choice index {index} out of range for question {question_id!r} "
            f"({n_choices} choices)"
        )
        self.question_id = question_id
        self.index = index
        self.n_choices = n_choices


class AlreadyFinalized(SessionError):
    pass


class InvalidStateTransition(SessionError):
    pass


class EmptyFinalText(SessionError):
    pass


# --- metrics --------------------------------------------------------------

class MetricsError(QAReplyError):
    pass


class NonPositiveDuration(MetricsError):
    pass


class WrongArity(MetricsError):
    pass


class OutOfRange(MetricsError):
    pass
