import { ApiError, SessionApi } from "./api";
import { ViewState } from "./state";
import type { EmailPayload, MetricsRecord } from "./types";

const apiBase =
  new URLSearchParams(location.search).get("api") ?? "http://127.0.0.1:8000";
const api = new SessionApi(apiBase);

let state: ViewState | null = null;

const $ = <T extends HTMLElement>(id: string): T =>
  document.getElementById(id) as T;

function setBusy(busy: boolean): void {
  if (state) state.busy = busy;
  document
    .querySelectorAll<HTMLButtonElement>("button[data-mutating]")
    .forEach((b) => (b.disabled = busy));
}

function showError(message: string | null): void {
  const banner = $<HTMLDivElement>("error-banner");
  banner.textContent = message ?? "";
  banner.style.display = message ? "block" : "none";
}

async function mutate<T>(op: () => Promise<T>): Promise<T | null> {
  if (state?.busy) return null;
  setBusy(true);
  showError(null);
  try {
    return await op();
  } catch (err) {
    showError(err instanceof ApiError ? err.message : String(err));
    return null;
  } finally {
    setBusy(false);
  }
}

function renderBody(): void {
  if (!state) return;
  const pre = $<HTMLPreElement>("email-body");
  pre.textContent = "";
  for (const segment of state.bodySegments()) {
    const node = document.createElement(segment.highlighted ? "mark" : "span");
    node.textContent = segment.text;
    pre.appendChild(node);
  }
  const badge = $<HTMLSpanElement>("anchor-badge");
  if (state.focusedIsUnanchored()) {
    badge.textContent = "no highlight available";
  } else if (state.focusedIsAmbiguous()) {
    badge.textContent = "⚠ this passage appears more than once";
  } else {
    badge.textContent = "";
  }
}

function renderQuestions(): void {
  if (!state) return;
  const list = $<HTMLDivElement>("questions");
  list.textContent = "";
  for (const view of state.questions) {
    const card = document.createElement("div");
    card.className = "question-card";
    if (state.focusedId === view.question.id) card.classList.add("focused");

    const title = document.createElement("p");
    title.textContent = view.question.question;
    title.onclick = () => {
      state!.focusQuestion(view.question.id);
      renderQuestions();
      renderBody();
    };
    card.appendChild(title);

    view.question.choices.forEach((choice, index) => {
      const label = document.createElement("label");
      const box = document.createElement("input");
      box.type = "checkbox";
      box.checked = view.selected.has(index);
      box.onchange = () => {
        state!.toggleChoice(view.question.id, index);
        renderQuestions();
      };
      label.appendChild(box);
      label.appendChild(document.createTextNode(" " + choice));
      card.appendChild(label);
    });

    for (const custom of view.customOptions) {
      const label = document.createElement("label");
      const box = document.createElement("input");
      box.type = "checkbox";
      box.checked = true;
      box.disabled = true;
      label.appendChild(box);
      label.appendChild(document.createTextNode(" " + custom + " (yours)"));
      card.appendChild(label);
    }

    const row = document.createElement("div");
    const input = document.createElement("input");
    input.placeholder = "Add your own option…";
    const add = document.createElement("button");
    add.textContent = "Add";
    add.onclick = () => {
      try {
        state!.addCustomOption(view.question.id, input.value);
        input.value = "";
        renderQuestions();
      } catch (err) {
        showError(String(err instanceof Error ? err.message : err));
      }
    };
    const skip = document.createElement("button");
    skip.textContent = view.skipped ? "Skipped" : "Skip";
    skip.onclick = () => {
      state!.skipQuestion(view.question.id);
      renderQuestions();
    };
    row.append(input, add, skip);
    card.appendChild(row);
    list.appendChild(card);
  }
}

function renderDrafts(): void {
  if (!state) return;
  const picker = $<HTMLSelectElement>("draft-picker");
  picker.textContent = "";
  state.drafts.forEach((draft, index) => {
    const option = document.createElement("option");
    option.value = String(index);
    option.textContent = `draft ${draft.generation_index}`;
    picker.appendChild(option);
  });
  if (state.activeDraftIndex !== null) {
    picker.value = String(state.activeDraftIndex);
  }
  $<HTMLTextAreaElement>("editor").value = state.editorText;
}

async function onCreateSession(): Promise<void> {
  const email: EmailPayload = {
    subject: $<HTMLInputElement>("email-subject").value,
    sender_name: $<HTMLInputElement>("email-sender-name").value,
    sender_address: $<HTMLInputElement>("email-sender-address").value,
    body: $<HTMLTextAreaElement>("email-body-input").value,
  };
  const user = {
    name: $<HTMLInputElement>("user-name").value,
    address: $<HTMLInputElement>("user-address").value,
    locale: $<HTMLInputElement>("user-locale").value || "en",
  };
  const created = await mutate(() => api.createSession(email, user));
  if (!created) return;
  state = new ViewState(created.session_id, email.body, created.question_set.questions);
  $<HTMLDivElement>("workspace").style.display = "block";
  renderQuestions();
  renderBody();
  renderDrafts();
}

async function onSubmitAnswersAndPrefs(): Promise<void> {
  if (!state) return;
  const prefs = {
    relationship: $<HTMLInputElement>("pref-relationship").value,
    formality: $<HTMLSelectElement>("pref-formality").value as never,
    tone: $<HTMLSelectElement>("pref-tone").value as never,
    length: $<HTMLSelectElement>("pref-length").value as never,
    free_instruction: $<HTMLTextAreaElement>("pref-instruction").value,
  };
  await mutate(async () => {
    await api.submitAnswers(state!.sessionId, state!.answersPayload());
    await api.setPreferences(state!.sessionId, prefs);
  });
}

async function onGenerate(regenerate: boolean): Promise<void> {
  if (!state) return;
  await onSubmitAnswersAndPrefs();
  const draft = await mutate(() =>
    regenerate
      ? api.regenerateDraft(state!.sessionId)
      : api.generateDraft(state!.sessionId),
  );
  if (draft) {
    state.acceptDraft(draft);
    renderDrafts();
  }
}

async function onFinalize(): Promise<void> {
  if (!state) return;
  state.editorText = $<HTMLTextAreaElement>("editor").value;
  if (!state.canFinalize()) {
    showError("The reply is empty; write or generate something first.");
    return;
  }
  const record = await mutate(() =>
    api.finalize(state!.sessionId, state!.editorText),
  );
  if (record) showMetrics(record);
}

function showMetrics(record: MetricsRecord): void {
  $<HTMLDivElement>("metrics").textContent =
    `Sent. ${record.final_char_count} chars in ` +
    `${record.elapsed_seconds.toFixed(1)} s ` +
    `(${record.chars_per_second.toFixed(2)} chars/s, ` +
    `${record.prompt_char_count} typed).`;
}

export function wireUp(): void {
  $<HTMLButtonElement>("btn-create").onclick = () => void onCreateSession();
  $<HTMLButtonElement>("btn-generate").onclick = () => void onGenerate(false);
  $<HTMLButtonElement>("btn-regenerate").onclick = () => void onGenerate(true);
  $<HTMLButtonElement>("btn-reply").onclick = () => void onFinalize();
  $<HTMLSelectElement>("draft-picker").onchange = (event) => {
    const index = Number((event.target as HTMLSelectElement).value);
    state?.pickDraft(index);
    renderDrafts();
  };
  $<HTMLTextAreaElement>("editor").oninput = (event) => {
    if (state) state.editorText = (event.target as HTMLTextAreaElement).value;
  };
}

if (typeof document !== "undefined" && document.readyState !== "loading") {
  wireUp();
} else if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", wireUp);
}
