/**
 * End-to-end page flow, scripted against the wire-exact fake service:
 * start a debate, trade turns up to the ten-turn target, rate it once.
 */

import { beforeEach, describe, expect, it } from "vitest";

import { FakeService } from "./fake-service.js";
import {
  bubbles,
  mount,
  passTurn,
  pickScore,
  q,
  sendReply,
  startDebate,
  submit,
} from "./helpers.js";

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("full debate flow", () => {
  it("runs ten alternating turns, then rates the debate once", async () => {
    const h = await mount();

    // ---- start: one agent bubble, no rating widget yet ----
    await startDebate(h, "every school should run a debate club");
    expect(bubbles()).toHaveLength(1);
    expect(q("#rating-form").hidden).toBe(true);
    expect(q("#turn-form").hidden).toBe(false);

    // ---- alternate human replies and agent continuations to the cap ----
    await sendReply(h, "clubs drain money from core subjects"); // 3 turns
    await passTurn(h); // 4
    await sendReply(h, "speech practice is a core subject"); // 6
    await passTurn(h); // 7
    await sendReply(h, "employers keep asking for it"); // 9
    expect(bubbles()).toHaveLength(9);
    expect(q("#rating-form").hidden).toBe(true);

    await sendReply(h, "so the budget argument fails"); // 10, human takes the last slot
    expect(bubbles()).toHaveLength(10);
    expect(bubbles().map((b) => b.querySelector(".speaker")!.textContent)).toEqual([
      "Alice",
      "Human",
      "Alice",
      "Bob",
      "Human",
      "Bob",
      "Alice",
      "Human",
      "Alice",
      "Human",
    ]);
    const sides = bubbles().map((b) => (b.classList.contains("pro") ? "pro" : "con"));
    expect(sides).toEqual(Array.from({ length: 10 }, (_, i) => (i % 2 === 0 ? "pro" : "con")));

    // ---- the debate is full: input gone, rating widget up ----
    expect(q("#turn-form").hidden).toBe(true);
    expect(q("#rating-form").hidden).toBe(false);
    expect(q("#unk-note").hidden).toBe(true); // nothing was blanked in this run

    // ---- rate it: exactly one CSV row lands on the service ----
    pickScore("style", 3);
    pickScore("content", 4);
    pickScore("strategy", 2);
    pickScore("overall", 3);
    submit(q("#rating-form"));
    await h.handle.whenIdle();
    expect(h.service.ratings).toEqual(["d0001,web,3,4,2,3"]);
    expect(q("#rating-done").hidden).toBe(false);
    expect(q<HTMLButtonElement>("#rate").disabled).toBe(true);

    // the page never had more than one request out at a time
    expect(h.service.maxInFlight).toBe(1);
  });

  it("renders blanked words as ___ and shows the note to raters", async () => {
    const h = await mount(
      new FakeService({
        replies: ["the ___ of this claim is ___ at best .", "no ___ supports that ."],
      }),
    );
    await startDebate(h, "the moon landing footage was staged");
    expect(bubbles()[0].querySelector(".text")!.textContent).toBe(
      "the ___ of this claim is ___ at best .",
    );
    expect(q("#unk-note").hidden).toBe(false);
    expect(q("#unk-note").textContent).toContain("___");
    expect(q("#unk-note").textContent).toContain("vocabulary");
  });
});
