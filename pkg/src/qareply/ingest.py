"""Turn incoming mail into an EmailMessage.

Two paths: standard .eml files (RFC 5322 + MIME) via the stdlib email
package, and a flat JSON payload for API callers. Whatever the path, the
returned body string is the anchor space: it is handed to the model
verbatim and never rewritten afterwards.
"""

from __future__ import annotations

import html
import re
from dataclasses import dataclass
from email import policy
from email.message import EmailMessage as MimeMessage
from email.parser import BytesParser
from email.utils import parseaddr

from .domain import EmailMessage
from .errors import BodyTooLarge, MalformedHeaders, MissingField, NoTextPart, WrongType

DEFAULT_MAX_BODY_CHARS = 20000

_BREAK_TAGS = re.compile(r"<br\s*/?>|</p>|</div>|</tr>|</li>|</h[1-6]>", re.IGNORECASE)
_ALL_TAGS = re.compile(r"<[^>]+>")


@dataclass(frozen=True)
class IngestConfig:
    max_body_chars: int = DEFAULT_MAX_BODY_CHARS
    strip_quoted_trail: bool = False
    default_locale: str = "en"

    def __post_init__(self):
        if self.max_body_chars <= 0:
            raise ValueError("max_body_chars must be positive")


def html_to_text(markup: str) -> str:
    """Flatten HTML to text, keeping break tags as newlines.

    Deliberately cheap: the flattened string becomes the anchor space, so
    the rule must be deterministic and easy to reproduce elsewhere.
    """
    text = re.sub(r"<(script|style)\b.*?</\1>", "", markup, flags=re.IGNORECASE | re.DOTALL)
    text = _BREAK_TAGS.sub("\n", text)
    text = _ALL_TAGS.sub("", text)
    return html.unescape(text)


def _strip_quoted_trail(body: str) -> str:
    lines = body.split("\n")
    kept: list[str] = []
    for line in lines:
        if line.startswith(">") or re.match(r"^On .+ wrote:\s*$", line):
            break
        kept.append(line)
    return "\n".join(kept).rstrip("\n")


def parse_mail_file(data: bytes, config: IngestConfig | None = None) -> EmailMessage:
    """Parse raw .eml bytes into an EmailMessage.

    Prefers the text/plain part; falls back to a flattened rendering of the
    HTML part. Attachments are ignored.
    """
    config = config or IngestConfig()
    try:
        msg: MimeMessage = BytesParser(policy=policy.default).parsebytes(data)
    except Exception as exc:
        raise MalformedHeaders(str(exc)) from exc

    subject = str(msg.get("Subject", "") or "")
    sender_name, sender_address = parseaddr(str(msg.get("From", "") or ""))
    if not sender_address and not subject:
        raise MalformedHeaders("no usable From or Subject header")

    body = _extract_body(msg)
    if body is None:
        raise NoTextPart("message has no text/plain or text/html part")
    if len(body) > config.max_body_chars:
        raise BodyTooLarge(
            f"body has {len(body)} chars, limit {config.max_body_chars}"
        )
    if config.strip_quoted_trail:
        body = _strip_quoted_trail(body)

    received_at = None
    try:
        received_at = msg.get("Date").datetime if msg.get("Date") else None
    except Exception:
        received_at = None

    return EmailMessage(
        subject=subject,
        sender_name=sender_name,
        sender_address=sender_address,
        body=body,
        received_at=received_at,
    )


def _extract_body(msg: MimeMessage) -> str | None:
    # line endings normalized to \n so the anchor space is stable across
    # transport encodings
    part = msg.get_body(preferencelist=("plain",))
    if part is not None:
        return part.get_content().replace("\r\n", "\n")
    part = msg.get_body(preferencelist=("html",))
    if part is not None:
        return html_to_text(part.get_content().replace("\r\n", "\n"))
    return None


def parse_json_email(payload: dict, config: IngestConfig | None = None) -> EmailMessage:
    """Map a JSON email payload verbatim; the body is never normalized."""
    config = config or IngestConfig()
    if not isinstance(payload, dict):
        raise WrongType("payload", "object")
    for key in ("subject", "sender_name", "sender_address", "body"):
        if key not in payload:
            raise MissingField(key)
        if not isinstance(payload[key], str):
            raise WrongType(key, "string")
    if len(payload["body"]) > config.max_body_chars:
        raise BodyTooLarge(
            f"body has {len(payload['body'])} chars, limit {config.max_body_chars}"
        )

    thread_raw = payload.get("thread", [])
    if not isinstance(thread_raw, list):
        raise WrongType("thread", "array")
    thread = tuple(parse_json_email(m, config) for m in thread_raw)

    return EmailMessage(
        subject=payload["subject"],
        sender_name=payload["sender_name"],
        sender_address=payload["sender_address"],
        body=payload["body"],
        thread=thread,
    )
