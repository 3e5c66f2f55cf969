import { describe, expect, it } from "vitest";

import { ApiError, createApi } from "../src/api.js";
import { FakeService } from "./fake-service.js";

function client(service = new FakeService()) {
  return { service, api: createApi("", service.fetch) };
}

describe("createApi", () => {
  it("reports health with the backend registry", async () => {
    const { api } = client(new FakeService({ backends: ["ngram3", "echo"] }));
    await expect(api.health()).resolves.toEqual({
      status: "ok",
      backends: ["echo", "ngram3"],
    });
  });

  it("creates a debate and returns the opening turn", async () => {
    const { service, api } = client();
    const created = await api.createDebate("taxes are too high", "echo", 10);
    expect(created.debate_id).toBe("d0001");
    expect(created.transcript.subject).toBe("taxes are too high");
    expect(created.transcript.turns).toHaveLength(1);
    expect(created.transcript.turns[0].speaker).toBe("Alice");
    expect(service.requests).toContain("POST /api/debates");
  });

  it("maps an unknown backend to a 422 ApiError", async () => {
    const { api } = client();
    const err = await api.createDebate("x", "nope", 10).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(422);
    expect(err.message).toContain("unknown backend");
  });

  it("maps a missing debate to a 404 ApiError", async () => {
    const { api } = client();
    const err = await api.getDebate("ghost").catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(404);
  });

  it("posts an agent turn with an empty body", async () => {
    const { service, api } = client();
    const { debate_id } = await api.createDebate("x", "echo", 10);
    const t = await api.postTurn(debate_id);
    expect(t.turns).toHaveLength(2);
    expect(t.turns[1].speaker).toBe("Bob");
    expect(service.requests.at(-1)).toBe(`POST /api/debates/${debate_id}/turns`);
  });

  it("posts a human turn and gets the agent reply in one round trip", async () => {
    const { api } = client();
    const { debate_id } = await api.createDebate("x", "echo", 10);
    const t = await api.postTurn(debate_id, "i disagree entirely");
    expect(t.turns.map((turn) => turn.speaker)).toEqual(["Alice", "Human", "Alice"]);
    expect(t.turns[1].display_text).toBe("i disagree entirely");
  });

  it("lets a human turn land exactly on the cap without an agent reply", async () => {
    const { api } = client();
    const { debate_id } = await api.createDebate("x", "echo", 2);
    const t = await api.postTurn(debate_id, "closing word");
    expect(t.turns).toHaveLength(2);
    expect(t.turns.at(-1)!.speaker).toBe("Human");
  });

  it("surfaces 409 once the debate is full", async () => {
    const { api } = client();
    const { debate_id } = await api.createDebate("x", "echo", 1);
    const err = await api.postTurn(debate_id).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(409);
  });

  it("posts a rating as one CSV row with the default rater id", async () => {
    const { service, api } = client();
    const { debate_id } = await api.createDebate("x", "echo", 1);
    await api.postRating(debate_id, { style: 3, content: 4, strategy: 2, overall: 3 });
    expect(service.ratings).toEqual([`${debate_id},web,3,4,2,3`]);
  });

  it("rejects an out-of-range score with a 400", async () => {
    const { api } = client();
    const { debate_id } = await api.createDebate("x", "echo", 1);
    const err = await api
      .postRating(debate_id, { style: 5, content: 1, strategy: 1, overall: 1 })
      .catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(400);
    expect(err.message).toContain("style");
  });

  it("lets network-level failures through untouched", async () => {
    const api = createApi("", () => Promise.reject(new TypeError("fetch failed")));
    const err = await api.health().catch((e) => e);
    expect(err).toBeInstanceOf(TypeError);
    expect(err).not.toBeInstanceOf(ApiError);
  });

  it("falls back to the status text when the error body is not JSON", async () => {
    const api = createApi("", () =>
      Promise.resolve(new Response("boom", { status: 500, statusText: "Internal Server Error" })),
    );
    const err = await api.health().catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.message).toBe("Internal Server Error");
  });
});
