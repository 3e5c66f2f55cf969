import { describe, expect, it } from "vitest";

import type { TranscriptJson } from "../src/types.js";
import { BLANK, hasBlanks, sideForTurn, toView } from "../src/view.js";

function transcript(texts: string[], maxTurns = 10): TranscriptJson {
  return {
    debate_id: "d42",
    subject: "cats make better pets than dogs",
    config: {
      max_turns: maxTurns,
      backend: "echo",
      seed: 0,
      max_tokens: 60,
      temperature: 1.0,
      history: "full",
      history_limit: 512,
      paper_protocol: false,
    },
    turns: texts.map((text, i) => ({
      speaker: i % 2 === 0 ? "Alice" : "Bob",
      tokens: text.split(" "),
      display_text: text,
    })),
  };
}

describe("sideForTurn", () => {
  it("starts pro and strictly alternates", () => {
    expect([0, 1, 2, 3, 4, 5].map(sideForTurn)).toEqual([
      "pro",
      "con",
      "pro",
      "con",
      "pro",
      "con",
    ]);
  });
});

describe("toView", () => {
  it("projects id, subject and turn texts", () => {
    const view = toView(transcript(["cats are clean .", "dogs are loyal ."]));
    expect(view.debateId).toBe("d42");
    expect(view.subject).toBe("cats make better pets than dogs");
    expect(view.maxTurns).toBe(10);
    expect(view.turns.map((t) => t.displayText)).toEqual([
      "cats are clean .",
      "dogs are loyal .",
    ]);
    expect(view.turns.map((t) => t.side)).toEqual(["pro", "con"]);
  });

  it("is AwaitingHuman below the cap", () => {
    expect(toView(transcript(["a"], 3)).status).toBe("AwaitingHuman");
  });

  it("is AgentThinking while a request is out", () => {
    expect(toView(transcript(["a"], 3), true).status).toBe("AgentThinking");
  });

  it("is Full at the cap, even mid-request", () => {
    expect(toView(transcript(["a", "b", "c"], 3)).status).toBe("Full");
    expect(toView(transcript(["a", "b", "c"], 3), true).status).toBe("Full");
  });

  it("carries nothing beyond speaker, text and side", () => {
    // the blinding key must not be reconstructable from the view
    const view = toView(transcript(["a"]));
    expect(Object.keys(view.turns[0]).sort()).toEqual(["displayText", "side", "speaker"]);
  });
});

describe("hasBlanks", () => {
  it("spots the out-of-vocabulary marker", () => {
    expect(hasBlanks(toView(transcript(["plain words only ."])))).toBe(false);
    expect(hasBlanks(toView(transcript(["the " + BLANK + " is wrong ."])))).toBe(true);
  });
});
