from __future__ import annotations

import json

import pytest
from hypothesis import given, strategies as st

from qareply.anchoring import AnchorSpan
from qareply.domain import (
    Answer,
    AnswerSet,
    EmailMessage,
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
from qareply.errors import (
    DuplicateId,
    EmptyQuestionText,
    IndexOutOfRange,
    InvalidStateTransition,
    TooManyQuestions,
    UnknownQuestionId,
)
from qareply.questions import parse_llm_questions

from conftest import APPENDIX_BODY, APPENDIX_QUESTIONS_JSON, DATES_SENTENCE, EVENT_SENTENCE


def _naive_find(body: str, part: str) -> int:
    """Independent linear scan, no str.find."""
    n, m = len(body), len(part)
    for i in range(n - m + 1):
        if body[i:i + m] == part:
            return i
    return -1


class TestValidateQuestionSet:
    def test_appendix_example_anchors_exactly(self, appendix_email):
        raw = parse_llm_questions(APPENDIX_QUESTIONS_JSON)
        validated = validate_question_set(raw, appendix_email)
        assert len(validated.questions) == 2
        for q, part in zip(validated.questions, (EVENT_SENTENCE, DATES_SENTENCE)):
            assert q.anchor is not None
            assert q.anchor.slice(appendix_email.body) == part
            assert q.anchor.start == _naive_find(appendix_email.body, part)
            assert not q.flags

    def test_empty_set_passes_through(self, appendix_email):
        validated = validate_question_set(QuestionSet(questions=()), appendix_email)
        assert validated.questions == ()

    def test_absent_part_gets_unanchored_flag(self, appendix_email):
        # oracle: exhaustive scan confirms the part is absent, exact and
        # whitespace-normalized
        part = "This sentence does not appear anywhere at all."
        assert _naive_find(appendix_email.body, part) == -1
        assert _naive_find(" ".join(appendix_email.body.split()), " ".join(part.split())) == -1
        q = Question(id="1", question="q?", choices=(), corresponding_part=part)
        validated = validate_question_set(
            QuestionSet(questions=(q,)), appendix_email
        )
        assert QuestionFlag.UNANCHORED in validated.questions[0].flags
        assert validated.questions[0].anchor is None

    def test_duplicate_id_rejected(self, appendix_email):
        q = Question(id="1", question="q?", choices=(), corresponding_part=EVENT_SENTENCE)
        with pytest.raises(DuplicateId):
            validate_question_set(QuestionSet(questions=(q, q)), appendix_email)

    def test_empty_question_text_rejected(self, appendix_email):
        q = Question(id="1", question="  ", choices=(), corresponding_part="")
        with pytest.raises(EmptyQuestionText):
            validate_question_set(QuestionSet(questions=(q,)), appendix_email)

    def test_over_cap_rejected(self, appendix_email):
        qs = tuple(
            Question(id=str(i), question="q?", choices=(), corresponding_part="")
            for i in range(11)
        )
        with pytest.raises(TooManyQuestions):
            validate_question_set(QuestionSet(questions=qs), appendix_email)

    @pytest.mark.parametrize("choice", ["Other", "other", " OTHER ", "その他"])
    def test_other_like_choice_flagged_not_removed(self, appendix_email, choice):
        q = Question(
            id="1", question="q?", choices=("Yes", choice),
            corresponding_part=EVENT_SENTENCE,
        )
        validated = validate_question_set(QuestionSet(questions=(q,)), appendix_email)
        assert QuestionFlag.OTHER_LIKE_CHOICE in validated.questions[0].flags
        assert validated.questions[0].choices == ("Yes", choice)

    def test_repeated_part_flagged_ambiguous_first_occurrence_wins(self):
        body = "Call me. Later on: Call me."
        email = EmailMessage(subject="s", sender_name="a", sender_address="a@x", body=body)
        q = Question(id="1", question="q?", choices=(), corresponding_part="Call me.")
        validated = validate_question_set(QuestionSet(questions=(q,)), email)
        out = validated.questions[0]
        assert QuestionFlag.AMBIGUOUS_ANCHOR in out.flags
        assert out.anchor.start == 0


class TestAnswers:
    def test_skipped_excludes_content(self):
        with pytest.raises(ValueError):
            Answer(question_id="1", selected=frozenset({0}), skipped=True)

    def test_check_answers_unknown_id(self, appendix_email):
        qs = validate_question_set(
            parse_llm_questions(APPENDIX_QUESTIONS_JSON), appendix_email
        )
        with pytest.raises(UnknownQuestionId):
            check_answers(AnswerSet((Answer(question_id="9"),)), qs)

    def test_check_answers_index_range(self, appendix_email):
        qs = validate_question_set(
            parse_llm_questions(APPENDIX_QUESTIONS_JSON), appendix_email
        )
        with pytest.raises(IndexOutOfRange):
            check_answers(
                AnswerSet((Answer(question_id="1", selected=frozenset({5})),)), qs
            )
        # in-range passes
        check_answers(
            AnswerSet((Answer(question_id="1", selected=frozenset({1})),)), qs
        )


class TestSession:
    def test_forward_only(self, appendix_email, user):
        s = Session(id="x", email=appendix_email, user=user)
        s.advance(SessionState.QUESTIONED)
        s.advance(SessionState.ANSWERED)
        with pytest.raises(InvalidStateTransition):
            s.advance(SessionState.QUESTIONED)

    def test_same_state_is_allowed(self, appendix_email, user):
        s = Session(id="x", email=appendix_email, user=user)
        s.advance(SessionState.ANSWERED)
        s.advance(SessionState.ANSWERED)


# --- canonical serialization round-trips ---------------------------------

_text = st.text(max_size=40)


@st.composite
def email_messages(draw, depth=0):
    thread = ()
    if depth == 0 and draw(st.booleans()):
        thread = tuple(draw(st.lists(email_messages(depth=1), max_size=2)))
    return EmailMessage(
        subject=draw(_text),
        sender_name=draw(_text),
        sender_address=draw(_text),
        body=draw(st.text(min_size=1, max_size=80)),
        thread=thread,
    )


@given(email_messages())
def test_email_roundtrip(msg):
    assert EmailMessage.from_dict(json.loads(json.dumps(msg.to_dict()))) == msg


@given(
    st.builds(
        Question,
        id=st.text(min_size=1, max_size=8),
        question=st.text(min_size=1, max_size=40),
        choices=st.lists(_text, max_size=4).map(tuple),
        corresponding_part=_text,
        anchor=st.none() | st.builds(AnchorSpan, start=st.integers(0, 50), length=st.integers(1, 50)),
        flags=st.sets(st.sampled_from(list(QuestionFlag))).map(frozenset),
    )
)
def test_question_roundtrip(q):
    d = json.loads(json.dumps(q.to_dict()))
    assert Question.from_dict(d) == q
    # wire field names match the published schema
    assert set(d) >= {"id", "question", "choices", "corresponding_part"}


@given(st.builds(ReplyPreferences))
def test_preferences_roundtrip(p):
    assert ReplyPreferences.from_dict(p.to_dict()) == p


def test_session_roundtrip(appendix_email, user):
    s = Session(id="abc", email=appendix_email, user=user)
    s.question_set = parse_llm_questions(APPENDIX_QUESTIONS_JSON)
    s.answers = AnswerSet((Answer(question_id="1", selected=frozenset({0})),))
    restored = Session.from_dict(json.loads(json.dumps(s.to_dict())))
    assert restored.to_dict() == s.to_dict()
