/**
 * In-memory stand-in for the debate service, speaking the exact wire
 * contract: same routes, same status codes, same JSON shapes, same
 * validation order. Tests hand its `fetch` to the client and script agent
 * replies / failures through the knobs below.
 */

import type { DebateConfigJson, TranscriptJson, TurnJson } from "../src/types.js";

const MAX_TURNS_LIMIT = 15;
const CRITERIA = ["style", "content", "strategy", "overall"] as const;

export const RATINGS_HEADER = "packet_id,rater_id,style,content,strategy,overall";

const DEFAULT_REPLIES = [
  "schools should teach debate because it sharpens reasoning .",
  "that claim ignores the cost of training every teacher .",
  "costs fall once the first cohort can coach the next .",
  "peer coaching spreads bad habits without expert review .",
  "expert review scales through recorded exemplar rounds .",
  "recordings cannot correct a live speaker mid round .",
];

interface DebateState {
  transcript: TranscriptJson;
  agentTurns: number;
  failTurns: number;
}

function json(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

function error(status: number, message: string): Response {
  return json(status, { error: message });
}

export class FakeService {
  readonly debates = new Map<string, DebateState>();
  readonly ratings: string[] = [];
  readonly requests: string[] = [];
  backends: string[];
  replies: string[];
  /** Fail this many upcoming turn posts with a 502, leaving state unchanged. */
  failTurns = 0;
  inFlight = 0;
  maxInFlight = 0;
  private nextId = 1;
  private gate: Promise<void> | null = null;

  constructor(opts: { backends?: string[]; replies?: string[] } = {}) {
    this.backends = opts.backends ?? ["echo", "ngram3"];
    this.replies = opts.replies ?? [...DEFAULT_REPLIES];
  }

  /** Hold every request until the returned release is called. */
  pause(): () => void {
    let release!: () => void;
    this.gate = new Promise((resolve) => {
      release = resolve;
    });
    return () => {
      this.gate = null;
      release();
    };
  }

  fetch: typeof fetch = async (input, init) => {
    if (typeof input !== "string") throw new Error("fake service expects string URLs");
    const path = input.replace(/^https?:\/\/[^/]+/, "");
    const method = init?.method ?? "GET";
    this.requests.push(`${method} ${path}`);
    this.inFlight += 1;
    this.maxInFlight = Math.max(this.maxInFlight, this.inFlight);
    try {
      if (this.gate) await this.gate;
      return this.route(method, path, init?.body);
    } finally {
      this.inFlight -= 1;
    }
  };

  private route(method: string, path: string, rawBody: BodyInit | null | undefined): Response {
    let body: Record<string, unknown> | null = {};
    if (typeof rawBody === "string" && rawBody !== "") {
      try {
        const parsed = JSON.parse(rawBody);
        body = parsed && typeof parsed === "object" && !Array.isArray(parsed) ? parsed : null;
      } catch {
        body = null;
      }
    }

    if (method === "GET" && path === "/api/health") {
      return json(200, { status: "ok", backends: [...this.backends].sort() });
    }
    if (method === "POST" && path === "/api/debates") {
      return this.createDebate(body);
    }
    let m = path.match(/^\/api\/debates\/([^/]+)$/);
    if (method === "GET" && m) {
      const state = this.debates.get(m[1]);
      if (!state) return error(404, `no debate '${m[1]}'`);
      return json(200, state.transcript);
    }
    m = path.match(/^\/api\/debates\/([^/]+)\/turns$/);
    if (method === "POST" && m) {
      return this.postTurn(m[1], body);
    }
    m = path.match(/^\/api\/debates\/([^/]+)\/rating$/);
    if (method === "POST" && m) {
      return this.postRating(m[1], body);
    }
    return error(404, `no route ${method} ${path}`);
  }

  private agentTurn(state: DebateState): TurnJson {
    const text = this.replies[state.agentTurns % this.replies.length];
    state.agentTurns += 1;
    const index = state.transcript.turns.length;
    return {
      speaker: index % 2 === 0 ? "Alice" : "Bob",
      tokens: text.split(/\s+/),
      display_text: text,
    };
  }

  private createDebate(body: Record<string, unknown> | null): Response {
    if (body === null) return error(400, "body must be a JSON object");
    const subject = body.subject;
    const backend = body.backend ?? "echo";
    const maxTurns = body.max_turns ?? 10;
    if (typeof subject !== "string" || subject.trim() === "") {
      return error(400, "subject must be a non-empty string");
    }
    if (typeof backend !== "string") return error(400, "backend must be a string");
    if (
      typeof maxTurns !== "number" ||
      !Number.isInteger(maxTurns) ||
      maxTurns < 1 ||
      maxTurns > MAX_TURNS_LIMIT
    ) {
      return error(400, `max_turns must be an integer in [1, ${MAX_TURNS_LIMIT}]`);
    }
    if (!this.backends.includes(backend)) return error(422, `unknown backend '${backend}'`);

    const id = `d${String(this.nextId++).padStart(4, "0")}`;
    const config: DebateConfigJson = {
      max_turns: maxTurns,
      backend,
      seed: 0,
      max_tokens: 60,
      temperature: 1.0,
      history: "full",
      history_limit: 512,
      paper_protocol: false,
    };
    const state: DebateState = {
      transcript: { debate_id: id, subject, config, turns: [] },
      agentTurns: 0,
      failTurns: 0,
    };
    state.transcript.turns.push(this.agentTurn(state));
    this.debates.set(id, state);
    return json(201, { debate_id: id, transcript: state.transcript });
  }

  private postTurn(id: string, body: Record<string, unknown> | null): Response {
    if (body === null) return error(400, "body must be a JSON object");
    const text = body.text;
    if (text !== undefined && typeof text !== "string") {
      return error(400, "text must be a string");
    }
    const state = this.debates.get(id);
    if (!state) return error(404, `no debate '${id}'`);
    const t = state.transcript;
    if (t.turns.length >= t.config.max_turns) {
      return error(409, "debate already has its final turn");
    }
    if (this.failTurns > 0) {
      this.failTurns -= 1;
      return error(502, "backend failure: scripted outage");
    }
    if (typeof text === "string") {
      t.turns.push({ speaker: "Human", tokens: text.split(/\s+/), display_text: text });
      // a human turn may land exactly on the cap, then no agent reply follows
      if (t.turns.length < t.config.max_turns) {
        t.turns.push(this.agentTurn(state));
      }
    } else {
      t.turns.push(this.agentTurn(state));
    }
    return json(200, t);
  }

  private postRating(id: string, body: Record<string, unknown> | null): Response {
    if (body === null) return error(400, "body must be a JSON object");
    for (const crit of CRITERIA) {
      const v = body[crit];
      if (typeof v !== "number" || !Number.isInteger(v) || v < 1 || v > 4) {
        return error(400, `${crit} must be an integer in [1, 4]`);
      }
    }
    if (!this.debates.has(id)) return error(404, `no debate '${id}'`);
    const rater = typeof body.rater_id === "string" ? body.rater_id : "web";
    const row = [id, rater, ...CRITERIA.map((crit) => body[crit])].join(",");
    this.ratings.push(row);
    return new Response(null, { status: 204 });
  }
}
