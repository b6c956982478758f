import type {
  AnswerPayload,
  CreateSessionResponse,
  DraftReply,
  EmailPayload,
  MetricsRecord,
  PreferencesPayload,
  QuestionSet,
  UserPayload,
} from "./types";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly errorType: string,
    detail: string,
  ) {
    super(`${errorType}: ${detail}`);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(url, {
    headers: { "Content-Type": "application/json" },
    ...init,
  });
  const data = await resp.json();
  if (!resp.ok) {
    throw new ApiError(resp.status, data.error ?? "HttpError", data.detail ?? resp.statusText);
  }
  return data as T;
}

/** Thin typed client for the session service; one in-flight mutation at a
 * time is the caller's responsibility. */
export class SessionApi {
  constructor(readonly baseUrl: string) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  createSession(email: EmailPayload, user: UserPayload): Promise<CreateSessionResponse> {
    return request(this.url("/sessions"), {
      method: "POST",
      body: JSON.stringify({ email, user }),
    });
  }

  getSession(sessionId: string): Promise<Record<string, unknown>> {
    return request(this.url(`/sessions/${sessionId}`));
  }

  retryQuestions(sessionId: string): Promise<QuestionSet> {
    return request(this.url(`/sessions/${sessionId}/questions`), { method: "POST" });
  }

  submitAnswers(sessionId: string, answers: AnswerPayload[]): Promise<unknown> {
    return request(this.url(`/sessions/${sessionId}/answers`), {
      method: "POST",
      body: JSON.stringify({ answers }),
    });
  }

  setPreferences(sessionId: string, prefs: PreferencesPayload): Promise<unknown> {
    return request(this.url(`/sessions/${sessionId}/preferences`), {
      method: "POST",
      body: JSON.stringify(prefs),
    });
  }

  generateDraft(sessionId: string): Promise<DraftReply> {
    return request(this.url(`/sessions/${sessionId}/draft`), { method: "POST" });
  }

  regenerateDraft(sessionId: string): Promise<DraftReply> {
    return request(this.url(`/sessions/${sessionId}/draft/regenerate`), { method: "POST" });
  }

  finalize(sessionId: string, finalText: string): Promise<MetricsRecord> {
    return request(this.url(`/sessions/${sessionId}/finalize`), {
      method: "POST",
      body: JSON.stringify({ final_text: finalText }),
    });
  }

  async health(): Promise<boolean> {
    try {
      const data = await request<{ status: string }>(this.url("/healthz"));
      return data.status === "ok";
    } catch {
      return false;
    }
  }
}
