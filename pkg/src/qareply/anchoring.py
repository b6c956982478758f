"""Resolve a quoted excerpt to a character span inside an email body.

Offsets are Unicode code point indices into the body string, which is the
exact string shown to the model. Resolution is layered: exact substring
first, then a whitespace-tolerant match mapped back to original offsets,
then a best contiguous fuzzy match gated by a similarity threshold so a
wrong stretch of text is never highlighted.
"""

from __future__ import annotations

import difflib
import enum
import re
from dataclasses import dataclass

DEFAULT_FUZZY_THRESHOLD = 0.8

# runs of whitespace or explicit break tags collapse to one space
_WS_OR_BREAK = re.compile(r"(?:\s|<br\s*/?>)+", re.IGNORECASE)


class AnchorMode(enum.Enum):
    EXACT = "exact"
    NORMALIZED = "normalized"
    FUZZY = "fuzzy"
    FAILED = "failed"


@dataclass(frozen=True)
class AnchorSpan:
    start: int
    length: int

    def __post_init__(self):
        if self.start < 0 or self.length < 1:
            raise ValueError(f"invalid span: start={self.start} length={self.length}")

    @property
    def end(self) -> int:
        return self.start + self.length

    def slice(self, body: str) -> str:
        return body[self.start:self.end]

    def to_dict(self) -> dict:
        return {"start": self.start, "length": self.length}

    @classmethod
    def from_dict(cls, d: dict) -> "AnchorSpan":
        return cls(start=int(d["start"]), length=int(d["length"]))


@dataclass(frozen=True)
class AnchorResolution:
    mode: AnchorMode
    span: AnchorSpan | None
    similarity: float
    occurrences: int = 1  # exact-match occurrence count, for ambiguity flagging

    def __post_init__(self):
        if self.mode is AnchorMode.EXACT and self.similarity != 1.0:
            raise ValueError("exact resolution must have similarity 1.0")
        if self.mode is AnchorMode.FAILED and self.span is not None:
            raise ValueError("failed resolution carries no span")


def _normalize_with_map(text: str) -> tuple[str, list[int]]:
    """Collapse whitespace/break runs to single spaces.

    Returns the normalized string and, for each normalized character, the
    offset of the original character it came from (a collapsed run maps to
    the offset of its first original character).
    """
    out: list[str] = []
    offsets: list[int] = []
    pos = 0
    for m in _WS_OR_BREAK.finditer(text):
        for i in range(pos, m.start()):
            out.append(text[i])
            offsets.append(i)
        out.append(" ")
        offsets.append(m.start())
        pos = m.end()
    for i in range(pos, len(text)):
        out.append(text[i])
        offsets.append(i)
    return "".join(out), offsets


def resolve_anchor(
    part: str,
    body: str,
    fuzzy_threshold: float = DEFAULT_FUZZY_THRESHOLD,
) -> AnchorResolution:
    """Locate `part` inside `body`, strictest strategy first."""
    if not part:
        return AnchorResolution(AnchorMode.FAILED, None, 0.0, occurrences=0)

    # 1. exact: first occurrence wins, count the rest for ambiguity flagging
    idx = body.find(part)
    if idx >= 0:
        return AnchorResolution(
            AnchorMode.EXACT,
            AnchorSpan(idx, len(part)),
            1.0,
            occurrences=body.count(part),
        )

    # 2. whitespace-collapsed match, span mapped back to original offsets
    norm_part = _normalize_with_map(part)[0].strip()
    if norm_part:
        norm_body, offsets = _normalize_with_map(body)
        j = norm_body.find(norm_part)
        if j >= 0:
            start = offsets[j]
            last = offsets[j + len(norm_part) - 1]
            # the last normalized char may stand for a collapsed run; extend
            # through the run it maps to only if it was not itself a space
            end = last + 1
            span = AnchorSpan(start, end - start)
            # similarity is judged on normalized text: the slice and the part
            # agree up to whitespace, so this is 1.0 by construction
            sim = _similarity(norm_part, _normalize_with_map(span.slice(body))[0].strip())
            return AnchorResolution(
                AnchorMode.NORMALIZED, span, sim, occurrences=norm_body.count(norm_part)
            )

    # 3. best contiguous common run, accepted only above the threshold
    matcher = difflib.SequenceMatcher(None, body, part, autojunk=False)
    block = matcher.find_longest_match(0, len(body), 0, len(part))
    similarity = block.size / len(part)
    if block.size > 0 and similarity >= fuzzy_threshold:
        return AnchorResolution(
            AnchorMode.FUZZY, AnchorSpan(block.a, block.size), similarity
        )
    return AnchorResolution(AnchorMode.FAILED, None, similarity, occurrences=0)


def _similarity(part: str, found: str) -> float:
    if part == found:
        return 1.0
    matcher = difflib.SequenceMatcher(None, found, part, autojunk=False)
    block = matcher.find_longest_match(0, len(found), 0, len(part))
    return block.size / len(part) if part else 0.0
