// Wire types for the session service JSON API.
// Field names mirror the server's canonical serialization exactly.

export interface AnchorSpan {
  start: number; // Unicode code point offset into the email body
  length: number; // code point count
}

export interface Question {
  id: string;
  question: string;
  choices: string[];
  corresponding_part: string;
  anchor: AnchorSpan | null;
  flags: string[];
}

export interface QuestionSet {
  questions: Question[];
  source: string;
  raw_response: string;
}

export interface EmailPayload {
  subject: string;
  sender_name: string;
  sender_address: string;
  body: string;
  thread?: EmailPayload[];
}

export interface UserPayload {
  name: string;
  address: string;
  locale?: string;
}

export interface AnswerPayload {
  question_id: string;
  selected: number[];
  custom_options: string[];
  skipped: boolean;
}

export interface PreferencesPayload {
  relationship?: string;
  formality?: "casual" | "neutral" | "formal";
  tone?: "friendly" | "neutral" | "apologetic" | "assertive";
  length?: "short" | "medium" | "long";
  free_instruction?: string;
}

export interface DraftReply {
  text: string;
  generation_index: number;
  created_at: string;
  prompt_digest: string;
  edited: boolean;
}

export interface MetricsRecord {
  final_char_count: number;
  elapsed_seconds: number;
  prompt_char_count: number;
  condition: string;
  chars_per_second: number;
}

export interface CreateSessionResponse {
  session_id: string;
  state: string;
  question_set: QuestionSet;
  error?: string;
  retry?: string;
}
