import { describe, expect, it } from "vitest";

import { codePointToUtf16, highlightedText, segmentBody } from "../src/highlight";
import { ViewState } from "../src/state";
import type { Question } from "../src/types";

const EVENT_SENTENCE = "We will hold an event on October 24th.";
const BODY =
  "Hello everyone,\n" +
  EVENT_SENTENCE +
  "\nPlease let us know your available dates within a week.\nBest,\nThe Organizers";

function question(partial: Partial<Question>): Question {
  return {
    id: "1",
    question: "Will you participate in the event on October 24th?",
    choices: ["Yes", "No"],
    corresponding_part: EVENT_SENTENCE,
    anchor: { start: 16, length: EVENT_SENTENCE.length },
    flags: [],
    ...partial,
  };
}

describe("segmentBody", () => {
  it("marks exactly the anchored sentence", () => {
    const segments = segmentBody(BODY, { start: 16, length: EVENT_SENTENCE.length });
    expect(highlightedText(segments)).toBe(EVENT_SENTENCE);
    expect(segments.filter((s) => s.highlighted)).toHaveLength(1);
    expect(segments.map((s) => s.text).join("")).toBe(BODY);
  });

  it("marks nothing for a null anchor", () => {
    const segments = segmentBody(BODY, null);
    expect(highlightedText(segments)).toBe("");
    expect(segments).toEqual([{ text: BODY, highlighted: false }]);
  });

  it("treats offsets as code points, not UTF-16 units", () => {
    // "🎉" is one code point but two UTF-16 units
    const body = "🎉 party on Friday? yes";
    const part = "party on Friday?";
    const segments = segmentBody(body, { start: 2, length: part.length });
    expect(highlightedText(segments)).toBe(part);
  });

  it("handles Japanese text offsets", () => {
    const body = "お世話になっております。10月24日に参加できますか？以上です。";
    const part = "10月24日に参加できますか？";
    const segments = segmentBody(body, { start: 12, length: part.length });
    expect(highlightedText(segments)).toBe(part);
  });

  it("falls back to no highlight for out-of-range spans", () => {
    const segments = segmentBody(BODY, { start: 10_000, length: 5 });
    expect(highlightedText(segments)).toBe("");
  });
});

describe("codePointToUtf16", () => {
  it("is identity for BMP-only text", () => {
    expect(codePointToUtf16("abcdef", 3)).toBe(3);
  });

  it("expands astral characters", () => {
    expect(codePointToUtf16("🎉🎉x", 2)).toBe(4);
  });
});

describe("ViewState focus", () => {
  it("focusing the example question highlights its sentence", () => {
    const state = new ViewState("sid", BODY, [question({})]);
    state.focusQuestion("1");
    expect(highlightedText(state.bodySegments())).toBe(EVENT_SENTENCE);
    expect(state.focusedIsUnanchored()).toBe(false);
  });

  it("unanchored question shows the badge and zero marked characters", () => {
    const state = new ViewState("sid", BODY, [
      question({ id: "2", anchor: null, flags: ["unanchored"] }),
    ]);
    state.focusQuestion("2");
    expect(state.focusedIsUnanchored()).toBe(true);
    expect(highlightedText(state.bodySegments())).toBe("");
  });

  it("keeps exactly one highlight when focus moves", () => {
    const other = "Please let us know your available dates within a week.";
    const state = new ViewState("sid", BODY, [
      question({}),
      question({
        id: "2",
        corresponding_part: other,
        anchor: { start: BODY.indexOf(other), length: other.length },
      }),
    ]);
    state.focusQuestion("1");
    state.focusQuestion("2");
    const segments = state.bodySegments();
    expect(segments.filter((s) => s.highlighted)).toHaveLength(1);
    expect(highlightedText(segments)).toBe(other);
  });

  it("flags ambiguous anchors for the warning glyph", () => {
    const state = new ViewState("sid", BODY, [
      question({ flags: ["ambiguous_anchor"] }),
    ]);
    state.focusQuestion("1");
    expect(state.focusedIsAmbiguous()).toBe(true);
  });
});
