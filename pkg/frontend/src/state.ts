import { segmentBody, type Segment } from "./highlight";
import type { AnswerPayload, DraftReply, Question } from "./types";

export interface QuestionView {
  question: Question;
  selected: Set<number>;
  customOptions: string[];
  skipped: boolean;
}

/**
 * Client-side view state for one reply session. Highlight offsets always
 * come from the server-provided anchors; this model only tracks which
 * question is focused and what the user has chosen.
 */
export class ViewState {
  readonly questions: QuestionView[];
  focusedId: string | null = null;
  drafts: DraftReply[] = [];
  activeDraftIndex: number | null = null; // index into drafts (history picker)
  editorText = "";
  busy = false;
  error: string | null = null;

  constructor(
    readonly sessionId: string,
    readonly emailBody: string,
    questions: Question[],
  ) {
    this.questions = questions.map((q) => ({
      question: q,
      selected: new Set<number>(),
      customOptions: [],
      skipped: false,
    }));
  }

  private view(questionId: string): QuestionView {
    const view = this.questions.find((v) => v.question.id === questionId);
    if (!view) throw new Error(`unknown question ${questionId}`);
    return view;
  }

  /** Exactly one question may be focused; focusing clears the previous one. */
  focusQuestion(questionId: string): void {
    this.view(questionId); // validate
    this.focusedId = questionId;
  }

  /** Render segments for the email body under the current focus. */
  bodySegments(): Segment[] {
    if (this.focusedId === null) {
      return segmentBody(this.emailBody, null);
    }
    const view = this.view(this.focusedId);
    return segmentBody(this.emailBody, view.question.anchor);
  }

  /** True when the focused question cannot be highlighted. */
  focusedIsUnanchored(): boolean {
    if (this.focusedId === null) return false;
    return this.view(this.focusedId).question.anchor === null;
  }

  focusedIsAmbiguous(): boolean {
    if (this.focusedId === null) return false;
    return this.view(this.focusedId).question.flags.includes("ambiguous_anchor");
  }

  toggleChoice(questionId: string, index: number): void {
    const view = this.view(questionId);
    if (index < 0 || index >= view.question.choices.length) {
      throw new Error(`choice index ${index} out of range`);
    }
    if (view.selected.has(index)) {
      view.selected.delete(index);
    } else {
      view.selected.add(index);
      view.skipped = false;
    }
  }

  /** Append a user-typed option; empty or blank text is rejected. */
  addCustomOption(questionId: string, text: string): void {
    if (!text.trim()) {
      throw new Error("custom option must not be empty");
    }
    const view = this.view(questionId);
    view.customOptions.push(text);
    view.skipped = false;
  }

  skipQuestion(questionId: string): void {
    const view = this.view(questionId);
    view.selected.clear();
    view.customOptions = [];
    view.skipped = true;
  }

  /** Payload for submit_answers, in question order. */
  answersPayload(): AnswerPayload[] {
    return this.questions.map((v) => ({
      question_id: v.question.id,
      selected: [...v.selected].sort((a, b) => a - b),
      custom_options: [...v.customOptions],
      skipped: v.skipped,
    }));
  }

  /** Record a server draft and load it into the editor. */
  acceptDraft(draft: DraftReply): void {
    this.drafts.push(draft);
    this.activeDraftIndex = this.drafts.length - 1;
    this.editorText = draft.text;
  }

  /** Switch the editor to an earlier draft without losing history. */
  pickDraft(index: number): void {
    const draft = this.drafts[index];
    if (!draft) throw new Error(`no draft at index ${index}`);
    this.activeDraftIndex = index;
    this.editorText = draft.text;
  }

  canFinalize(): boolean {
    return this.editorText.trim().length > 0;
  }
}
