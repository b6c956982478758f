from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from qareply.anchoring import AnchorMode, AnchorSpan, resolve_anchor


def test_part_equal_to_body_is_identity_span():
    body = "The whole body is the part."
    res = resolve_anchor(body, body)
    assert res.mode is AnchorMode.EXACT
    assert res.span == AnchorSpan(0, len(body))
    assert res.similarity == 1.0


def test_exact_offset_matches_naive_scan():
    body = "Greetings.\nWe will hold an event on October 24th.\nSee you."
    part = "We will hold an event on October 24th."
    # independent linear scan
    expected = next(
        i for i in range(len(body)) if body[i:i + len(part)] == part
    )
    res = resolve_anchor(part, body)
    assert res.mode is AnchorMode.EXACT
    assert res.span.start == expected
    assert res.span.length == len(part)
    assert res.span.slice(body) == part


def test_doubled_space_maps_back_to_original_offsets():
    # 40-char body, hand-mapped: the two-space run at offsets 14-15
    body = "abcd efgh ijkl  mnop qrst uvwx yz012 345"
    assert len(body) == 40
    part = "ijkl mnop qrst"  # single space where the body doubles it
    res = resolve_anchor(part, body)
    assert res.mode is AnchorMode.NORMALIZED
    # hand-mapped: 'i' at 10, 't' of 'qrst' at 24 inclusive
    assert res.span == AnchorSpan(10, 15)
    assert " ".join(res.span.slice(body).split()) == " ".join(part.split())


def test_break_tag_treated_as_whitespace():
    body = "First line<br>Second line here."
    part = "First line Second line"
    res = resolve_anchor(part, body)
    assert res.mode is AnchorMode.NORMALIZED
    slice_ = res.span.slice(body)
    assert slice_.startswith("First line")
    assert slice_.endswith("Second line")


def test_fuzzy_accepts_above_threshold():
    body = "Please send the quarterly report by Friday afternoon."
    part = "Xlease send the quarterly report by Friday"  # one leading edit
    res = resolve_anchor(part, body)
    assert res.mode is AnchorMode.FUZZY
    assert res.similarity >= 0.8
    assert res.span.slice(body) in body


def test_fuzzy_rejects_below_threshold():
    body = "Completely unrelated content about gardening tips."
    part = "Quarterly finance report deadline"
    res = resolve_anchor(part, body)
    assert res.mode is AnchorMode.FAILED
    assert res.span is None


def test_empty_part_fails():
    assert resolve_anchor("", "body").mode is AnchorMode.FAILED


def test_occurrence_count():
    res = resolve_anchor("ab", "ab cd ab")
    assert res.occurrences == 2
    assert res.span.start == 0


# --- properties -----------------------------------------------------------

_bodies = st.text(
    alphabet=st.characters(blacklist_categories=("Cs",)), min_size=5, max_size=120
)


@settings(max_examples=200)
@given(st.data())
def test_exact_substring_always_resolves_exact(data):
    body = data.draw(_bodies)
    start = data.draw(st.integers(0, len(body) - 1))
    end = data.draw(st.integers(start + 1, len(body)))
    part = body[start:end]
    res = resolve_anchor(part, body)
    assert res.mode is AnchorMode.EXACT
    assert res.span.slice(body) == part
    # first occurrence wins
    assert body[: res.span.start].find(part) == -1


@settings(max_examples=200)
@given(st.data())
def test_span_never_highlights_wrong_text(data):
    """Whatever the resolution path, a returned span is justified."""
    body = data.draw(_bodies)
    part = data.draw(st.text(min_size=1, max_size=60))
    res = resolve_anchor(part, body)
    if res.span is None:
        assert res.mode is AnchorMode.FAILED
        return
    slice_ = res.span.slice(body)
    if res.mode is AnchorMode.EXACT:
        assert slice_ == part
    elif res.mode is AnchorMode.NORMALIZED:
        import re

        norm = lambda s: re.sub(r"(?:\s|<br\s*/?>)+", " ", s, flags=re.I).strip()
        assert norm(slice_) == norm(part)
    else:
        assert res.similarity >= 0.8
