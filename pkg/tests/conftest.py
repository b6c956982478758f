from __future__ import annotations

import json

import pytest

from qareply.domain import EmailMessage, UserIdentity
from qareply.errors import ProviderError, TransportError
from qareply.questions import PromptText

# The two quoted sentences from the published output-format example,
# embedded in a fixture body so both anchor exactly.
EVENT_SENTENCE = "We will hold an event on October 24th."
DATES_SENTENCE = "Please let us know your available dates within a week."

APPENDIX_BODY = (
    "Hello everyone,\n"
    f"{EVENT_SENTENCE}\n"
    f"{DATES_SENTENCE}\n"
    "Best,\nThe Organizers"
)

APPENDIX_QUESTIONS_JSON = json.dumps(
    {
        "questions": [
            {
                "id": "1",
                "question": "Will you participate in the event on October 24th?",
                "choices": ["Yes", "No"],
                "corresponding_part": EVENT_SENTENCE,
            },
            {
                "id": "2",
                "question": "Please select the available dates (multiple selections possible).",
                "choices": [
                    "July 10th", "July 11th", "July 12th", "July 13th",
                    "July 14th", "July 15th", "July 16th",
                ],
                "corresponding_part": DATES_SENTENCE,
            },
        ]
    },
    ensure_ascii=False,
)


@pytest.fixture
def appendix_email() -> EmailMessage:
    return EmailMessage(
        subject="Event invitation",
        sender_name="The Organizers",
        sender_address="organizers@example.com",
        body=APPENDIX_BODY,
    )


@pytest.fixture
def user() -> UserIdentity:
    return UserIdentity(name="Taro Yamada", address="taro@example.com", locale="ja")


class ScriptedProvider:
    """Replays a fixed sequence of responses or exceptions."""

    deterministic = False

    def __init__(self, script):
        self.script = list(script)
        self.calls = 0

    def complete(self, prompt: PromptText) -> str:
        self.calls += 1
        if not self.script:
            raise TransportError("script exhausted")
        item = self.script.pop(0)
        if isinstance(item, Exception):
            raise item
        return item


@pytest.fixture
def scripted_provider_factory():
    return ScriptedProvider
