"""Completion providers: a live chat-completion HTTP adapter and a
deterministic offline mock.

Both expose ``complete(prompt) -> str`` plus a ``deterministic`` flag so
the engines know whether retrying an identical call can ever help.
"""

from __future__ import annotations

import json
import os
import re
import time
from dataclasses import dataclass, field

import httpx

from .errors import AuthError, ProviderTimeout, RateLimited, TransportError
from .questions import MAIL_FOOTER, MAIL_HEADER, PromptKind, PromptText

ENV_API_KEY = "QAREPLY_API_KEY"
ENV_BASE_URL = "QAREPLY_BASE_URL"
ENV_MODEL = "QAREPLY_MODEL"

DEFAULT_BASE_URL = "https://api.openai.com/v1"
DEFAULT_MODEL = "gpt-4o"

REQUEST_KEYWORDS = ("please", "could you", "お願い")


@dataclass
class ProviderConfig:
    base_url: str = DEFAULT_BASE_URL
    api_key: str = field(default="", repr=False)
    model_name: str = DEFAULT_MODEL
    temperature: float = 0.0
    timeout_seconds: float = 60.0
    max_retries: int = 3

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.timeout_seconds <= 0:
            raise ValueError("timeout_seconds must be positive")

    @classmethod
    def from_env(cls, **overrides) -> "ProviderConfig":
        kwargs = {
            "base_url": os.environ.get(ENV_BASE_URL, DEFAULT_BASE_URL),
            "api_key": os.environ.get(ENV_API_KEY, ""),
            "model_name": os.environ.get(ENV_MODEL, DEFAULT_MODEL),
        }
        kwargs.update(overrides)
        return cls(**kwargs)

    def to_dict(self) -> dict:
        # api_key deliberately omitted: it must never be serialized
        return {
            "base_url": self.base_url,
            "model_name": self.model_name,
            "temperature": self.temperature,
            "timeout_seconds": self.timeout_seconds,
            "max_retries": self.max_retries,
        }


class HttpProvider:
    """Chat-completion client with bounded retries and backoff."""

    deterministic = False

    def __init__(self, config: ProviderConfig, *, backoff_base: float = 0.5):
        self.config = config
        self.backoff_base = backoff_base
        self.last_attempts = 0
        self.last_latency = 0.0

    def complete(self, prompt: PromptText) -> str:
        cfg = self.config
        if not cfg.api_key:
            raise AuthError(f"no API key; set {ENV_API_KEY}", attempts=0)
        payload = {
            "model": cfg.model_name,
            "messages": [{"role": "user", "content": prompt.text}],
            "temperature": cfg.temperature,
        }
        url = cfg.base_url.rstrip("/") + "/chat/completions"
        started = time.monotonic()
        last_exc: Exception | None = None
        for attempt in range(1, cfg.max_retries + 2):
            self.last_attempts = attempt
            try:
                resp = httpx.post(
                    url,
                    json=payload,
                    headers={"Authorization": f"Bearer {cfg.api_key}"},
                    timeout=cfg.timeout_seconds,
                )
            except httpx.TimeoutException as exc:
                last_exc = ProviderTimeout(str(exc), attempts=attempt)
            except httpx.HTTPError as exc:
                last_exc = TransportError(str(exc), attempts=attempt)
            else:
                if resp.status_code in (401, 403):
                    raise AuthError(f"provider rejected credentials ({resp.status_code})",
                                    attempts=attempt)
                if resp.status_code == 429:
                    last_exc = RateLimited("rate limited", attempts=attempt)
                elif resp.status_code >= 500:
                    last_exc = TransportError(
                        f"server error {resp.status_code}", attempts=attempt
                    )
                else:
                    self.last_latency = time.monotonic() - started
                    return self._extract_text(resp)
            if attempt <= cfg.max_retries:
                time.sleep(self.backoff_base * (2 ** (attempt - 1)))
        self.last_latency = time.monotonic() - started
        raise last_exc  # type: ignore[misc]

    @staticmethod
    def _extract_text(resp: httpx.Response) -> str:
        try:
            data = resp.json()
            return data["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise TransportError(f"unexpected response shape: {exc}") from exc


_SENTENCE = re.compile(r"[^.!?。！？\n]+[.!?。！？]?")
_QA_LINE = re.compile(r"^- .+ → (.+)$")


def _extract_body(prompt_text: str) -> str:
    start = prompt_text.find(MAIL_HEADER)
    end = prompt_text.rfind(MAIL_FOOTER)
    if start < 0 or end < 0:
        return ""
    return prompt_text[start + len(MAIL_HEADER) + 1 : end].rstrip("\n")


def mock_question_response(prompt_text: str) -> str:
    """One Yes/No question per interrogative or request sentence."""
    text = _extract_body(prompt_text)
    questions = []
    for m in _SENTENCE.finditer(text):
        sentence = m.group(0).strip()
        if not sentence:
            continue
        lowered = sentence.casefold()
        if sentence.endswith(("?", "？")) or any(k in lowered for k in REQUEST_KEYWORDS):
            questions.append(
                {
                    "id": str(len(questions) + 1),
                    "question": f"How would you like to respond to: {sentence}",
                    "choices": ["Yes", "No"],
                    "corresponding_part": sentence,
                }
            )
    return json.dumps({"questions": questions}, ensure_ascii=False, indent=2)


def mock_draft_response(prompt_text: str) -> str:
    """Fixed-template reply embedding each transcript answer line once."""
    sender = ""
    user = ""
    lines = prompt_text.split("\n")
    for i, line in enumerate(lines):
        if line.startswith("From: ") and not sender:
            sender = line[len("From: "):].split("<")[0].strip()
        if line.startswith("###User"):
            if i + 1 < len(lines):
                user = lines[i + 1].split("<")[0].strip()
    answers = [m.group(1) for line in lines if (m := _QA_LINE.match(line))]
    instruction = ""
    for line in lines:
        if line.startswith("Additional instruction: "):
            instruction = line[len("Additional instruction: "):]

    out = [f"Dear {sender}," if sender else "Hello,", ""]
    out.append("Thank you for your email.")
    for answer in answers:
        out.append(f"- {answer}")
    if instruction:
        out.append(f"({instruction})")
    out.append("")
    out.append("Best regards,")
    out.append(user or "")
    return "\n".join(out)


class MockProvider:
    """Pure function of the prompt text; no network, no credentials."""

    deterministic = True

    def __init__(self):
        self.last_attempts = 0

    def complete(self, prompt: PromptText) -> str:
        self.last_attempts = 1
        if prompt.kind is PromptKind.QUESTION_GEN:
            return mock_question_response(prompt.text)
        return mock_draft_response(prompt.text)


def make_provider(name: str, config: ProviderConfig | None = None):
    if name == "mock":
        return MockProvider()
    if name == "live":
        return HttpProvider(config or ProviderConfig.from_env())
    raise ValueError(f"unknown provider {name!r}")
