/**
 * Thin typed client for the debate service. Every method maps to one
 * endpoint; non-2xx responses become ApiError with the server's message.
 * Network-level failures (service down) propagate as plain TypeError from
 * fetch, so callers can tell "server said no" from "no server".
 */

import type {
  CreateDebateResponse,
  HealthJson,
  RatingBody,
  TranscriptJson,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export interface DebateApi {
  health(): Promise<HealthJson>;
  createDebate(subject: string, backend: string, maxTurns: number): Promise<CreateDebateResponse>;
  getDebate(debateId: string): Promise<TranscriptJson>;
  /** Omit `text` to let the agent take the turn itself. */
  postTurn(debateId: string, text?: string): Promise<TranscriptJson>;
  postRating(debateId: string, rating: RatingBody): Promise<void>;
}

async function toApiError(res: Response): Promise<ApiError> {
  let message = res.statusText || `HTTP ${res.status}`;
  try {
    const body = await res.json();
    if (body && typeof body.error === "string") message = body.error;
  } catch {
    // non-JSON error body, keep the status text
  }
  return new ApiError(res.status, message);
}

export function createApi(baseUrl: string, fetchFn: typeof fetch = fetch): DebateApi {
  const base = baseUrl.replace(/\/$/, "");

  async function request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const res = await fetchFn(`${base}${path}`, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!res.ok) throw await toApiError(res);
    if (res.status === 204) return undefined as T;
    return (await res.json()) as T;
  }

  return {
    health: () => request<HealthJson>("GET", "/api/health"),
    createDebate: (subject, backend, maxTurns) =>
      request<CreateDebateResponse>("POST", "/api/debates", {
        subject,
        backend,
        max_turns: maxTurns,
      }),
    getDebate: (debateId) => request<TranscriptJson>("GET", `/api/debates/${debateId}`),
    postTurn: (debateId, text) =>
      request<TranscriptJson>(
        "POST",
        `/api/debates/${debateId}/turns`,
        text === undefined ? {} : { text },
      ),
    postRating: (debateId, rating) =>
      request<void>("POST", `/api/debates/${debateId}/rating`, rating),
  };
}
