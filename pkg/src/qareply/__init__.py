"""QA-based email reply toolkit.

Generate anchored multiple-choice questions from an incoming email, collect
answers and reply preferences, and synthesize an editable reply draft.
"""

from .anchoring import AnchorMode, AnchorResolution, AnchorSpan, resolve_anchor
from .domain import (
    Answer,
    AnswerSet,
    Condition,
    DraftReply,
    EmailMessage,
    MetricsRecord,
    Question,
    QuestionFlag,
    QuestionSet,
    ReplyPreferences,
    Session,
    SessionState,
    UserIdentity,
    check_answers,
    validate_question_set,
)
from .drafting import apply_edit, build_draft_prompt, generate_draft
from .gateway import HttpProvider, MockProvider, ProviderConfig, make_provider
from .ingest import IngestConfig, parse_json_email, parse_mail_file
from .metrics import efficiency, prompt_char_count, raw_tlx
from .questions import (
    PromptKind,
    PromptText,
    build_question_prompt,
    generate_questions,
    parse_llm_questions,
    question_instruction_text,
)

__version__ = "0.1.0"
