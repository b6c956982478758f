// Full workflow against the real backend running with the mock provider:
// receive → answer → generate → edit → finalize, with draft history
// preserved across one regeneration.

import { spawn, type ChildProcess } from "node:child_process";
import { createServer } from "node:net";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { SessionApi } from "../src/api";
import { highlightedText } from "../src/highlight";
import { ViewState } from "../src/state";

const BODY =
  "Hi Bob. Can you attend the kickoff on Friday? " +
  "Please send the signed form back. Thanks!";

let server: ChildProcess;
let api: SessionApi;

async function freePort(): Promise<number> {
  return new Promise((resolve) => {
    const srv = createServer();
    srv.listen(0, "127.0.0.1", () => {
      const port = (srv.address() as { port: number }).port;
      srv.close(() => resolve(port));
    });
  });
}

beforeAll(async () => {
  const port = await freePort();
  server = spawn(
    "python3",
    ["-m", "qareply.cli", "serve", "--port", String(port), "--provider", "mock"],
    { stdio: "ignore" },
  );
  api = new SessionApi(`http://127.0.0.1:${port}`);
  const deadline = Date.now() + 20_000;
  while (!(await api.health())) {
    if (Date.now() > deadline) throw new Error("backend did not start");
    await new Promise((r) => setTimeout(r, 200));
  }
}, 30_000);

afterAll(() => {
  server?.kill("SIGINT");
});

describe("full reply walkthrough", () => {
  it("runs receive → answer → generate → edit → finalize", async () => {
    const created = await api.createSession(
      {
        subject: "Kickoff",
        sender_name: "Ann",
        sender_address: "ann@example.com",
        body: BODY,
      },
      { name: "Bob", address: "bob@example.com", locale: "en" },
    );
    expect(created.question_set.questions.length).toBe(2);

    const state = new ViewState(
      created.session_id,
      BODY,
      created.question_set.questions,
    );

    // highlight exactness against the server-provided anchor
    state.focusQuestion(state.questions[0]!.question.id);
    expect(highlightedText(state.bodySegments())).toBe(
      state.questions[0]!.question.corresponding_part,
    );

    state.toggleChoice(state.questions[0]!.question.id, 0); // Yes
    state.addCustomOption(state.questions[1]!.question.id, "form goes out Monday");
    await api.submitAnswers(state.sessionId, state.answersPayload());
    await api.setPreferences(state.sessionId, {
      tone: "friendly",
      relationship: "my colleague",
    });

    const first = await api.generateDraft(state.sessionId);
    state.acceptDraft(first);
    expect(first.generation_index).toBe(1);
    expect(first.text).toContain("Yes");
    expect(first.text).toContain("form goes out Monday");

    // regeneration appends history without losing the first draft
    const second = await api.regenerateDraft(state.sessionId);
    state.acceptDraft(second);
    expect(second.generation_index).toBe(2);
    expect(state.drafts).toHaveLength(2);
    state.pickDraft(0);
    expect(state.editorText).toBe(first.text);

    // user edit, then send
    state.editorText = first.text + "\nP.S. see you there!";
    expect(state.canFinalize()).toBe(true);
    const record = await api.finalize(state.sessionId, state.editorText);
    expect(record.final_char_count).toBe([...state.editorText].length);
    expect(record.condition).toBe("qa_based");
    expect(record.chars_per_second).toBeGreaterThan(0);

    // finalized sessions refuse further mutation
    await expect(api.generateDraft(state.sessionId)).rejects.toThrow(/AlreadyFinalized/);
  }, 30_000);

  it("rejects an empty final text", async () => {
    const created = await api.createSession(
      { subject: "s", sender_name: "a", sender_address: "a@x", body: "Could you check?" },
      { name: "u", address: "u@x" },
    );
    await expect(api.finalize(created.session_id, "")).rejects.toThrow(/EmptyFinalText/);
  }, 15_000);
});
