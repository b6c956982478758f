import type { AnchorSpan } from "./types";

export interface Segment {
  text: string;
  highlighted: boolean;
}

/**
 * Convert a Unicode code point offset (the server's unit) into a UTF-16
 * index usable with String.prototype.slice. Astral characters occupy one
 * code point but two UTF-16 units, so the two scales diverge.
 */
export function codePointToUtf16(text: string, codePointOffset: number): number {
  let utf16 = 0;
  let remaining = codePointOffset;
  while (remaining > 0 && utf16 < text.length) {
    const cp = text.codePointAt(utf16)!;
    utf16 += cp > 0xffff ? 2 : 1;
    remaining--;
  }
  return utf16;
}

/**
 * Split the email body into render segments with exactly one highlighted
 * range, or a single plain segment when the span is null (unanchored
 * question) or out of bounds. Offsets always come from the server; they
 * are never recomputed here.
 */
export function segmentBody(body: string, span: AnchorSpan | null): Segment[] {
  if (span === null) {
    return [{ text: body, highlighted: false }];
  }
  const start = codePointToUtf16(body, span.start);
  const end = codePointToUtf16(body, span.start + span.length);
  if (start >= end || end > body.length) {
    return [{ text: body, highlighted: false }];
  }
  const segments: Segment[] = [];
  if (start > 0) {
    segments.push({ text: body.slice(0, start), highlighted: false });
  }
  segments.push({ text: body.slice(start, end), highlighted: true });
  if (end < body.length) {
    segments.push({ text: body.slice(end), highlighted: false });
  }
  return segments;
}

/** The text content of the single highlighted segment, if any. */
export function highlightedText(segments: Segment[]): string {
  return segments
    .filter((s) => s.highlighted)
    .map((s) => s.text)
    .join("");
}
