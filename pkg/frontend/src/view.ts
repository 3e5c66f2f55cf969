/**
 * Pure projection from the service transcript JSON to what the page shows.
 * Kept free of DOM so it can be tested as plain data.
 */

import type { Side, Status, TranscriptJson, TranscriptView, TurnView } from "./types.js";

/** Marker the generator substitutes for words outside its vocabulary. */
export const BLANK = "___";

/**
 * The opening turn argues for the thesis; each turn after that attacks the
 * one before it, so sides strictly alternate from pro.
 */
export function sideForTurn(index: number): Side {
  return index % 2 === 0 ? "pro" : "con";
}

export function toView(transcript: TranscriptJson, thinking = false): TranscriptView {
  const turns: TurnView[] = transcript.turns.map((turn, i) => ({
    speaker: turn.speaker,
    displayText: turn.display_text,
    side: sideForTurn(i),
  }));
  let status: Status;
  if (turns.length >= transcript.config.max_turns) {
    status = "Full";
  } else {
    status = thinking ? "AgentThinking" : "AwaitingHuman";
  }
  return {
    debateId: transcript.debate_id,
    subject: transcript.subject,
    maxTurns: transcript.config.max_turns,
    turns,
    status,
  };
}

/** True when any turn contains blanked-out words the rater should know about. */
export function hasBlanks(view: TranscriptView): boolean {
  return view.turns.some((turn) => turn.displayText.includes(BLANK));
}
