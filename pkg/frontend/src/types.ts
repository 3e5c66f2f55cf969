/**
 * Wire types for the debate service JSON API, plus the view model the
 * page renders. The wire shapes mirror the server exactly; the view is a
 * pure projection of them (no extra fields are ever carried along, so
 * nothing about a transcript's provenance can leak into the DOM).
 */

// ---- service wire shapes ----------------------------------------------------

export type Speaker = "Alice" | "Bob" | "Human";

export interface TurnJson {
  speaker: Speaker;
  tokens: string[];
  display_text: string;
}

export interface DebateConfigJson {
  max_turns: number;
  backend: string;
  seed: number;
  max_tokens: number;
  temperature: number;
  history: string;
  history_limit: number;
  paper_protocol: boolean;
}

export interface TranscriptJson {
  debate_id: string;
  subject: string;
  config: DebateConfigJson;
  turns: TurnJson[];
}

/** POST /api/debates wraps the transcript; every other route returns it bare. */
export interface CreateDebateResponse {
  debate_id: string;
  transcript: TranscriptJson;
}

export interface HealthJson {
  status: string;
  backends: string[];
}

export interface RatingBody {
  style: number;
  content: number;
  strategy: number;
  overall: number;
  rater_id?: string;
}

// ---- view model ---------------------------------------------------------------

/** Which side of the thesis a turn argues; drives the green/red coloring. */
export type Side = "pro" | "con";

export type Status = "AwaitingHuman" | "AgentThinking" | "Full";

export interface TurnView {
  speaker: Speaker;
  displayText: string;
  side: Side;
}

export interface TranscriptView {
  debateId: string;
  subject: string;
  maxTurns: number;
  turns: TurnView[];
  status: Status;
}
