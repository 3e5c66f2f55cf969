/**
 * Single-page debate client.
 *
 * The page is a straight projection of the last transcript the service
 * returned, so there is no polling and no client-side store to fall out of
 * sync: every action POSTs, gets the full transcript back, and re-renders.
 * A single `busy` flag serializes requests; while the agent is thinking the
 * reply box is disabled and a typing indicator shows.
 */

import { ApiError, type DebateApi } from "./api.js";
import type { RatingBody, TranscriptJson, TranscriptView, TurnView } from "./types.js";
import { BLANK, hasBlanks, sideForTurn, toView } from "./view.js";

/** Debates run to ten turns; the rating widget appears when the last one lands. */
export const TARGET_TURNS = 10;

export const CRITERIA = ["style", "content", "strategy", "overall"] as const;

const SCORES = [1, 2, 3, 4];

export interface AppHandle {
  /** Resolves once the backend list (and any debate named in the URL) loaded. */
  ready: Promise<void>;
  /** Resolves when no request is in flight; for tests and scripting. */
  whenIdle(): Promise<void>;
}

// ==================== page skeleton ====================

const PAGE = `
  <h1>Debate practice</h1>
  <div id="banner" class="banner" hidden>
    <span id="banner-text"></span>
    <button id="retry" type="button" hidden>Retry</button>
  </div>
  <form id="start-form">
    <input id="subject" type="text" placeholder="State a thesis to debate" autocomplete="off" />
    <select id="backend" aria-label="Opponent"></select>
    <button id="start" type="submit" disabled>Start debate</button>
  </form>
  <section id="debate" hidden>
    <h2 id="subject-line"></h2>
    <div id="turns"></div>
    <p id="unk-note" class="note" hidden>
      Words shown as ${BLANK} were outside the vocabulary and have been blanked
      out; judge the argument as if a fitting word stood in each blank.
    </p>
    <div id="typing" hidden><span></span><span></span><span></span></div>
    <form id="turn-form">
      <input id="reply" type="text" placeholder="Refute the last argument" autocomplete="off" />
      <button id="send" type="submit">Send</button>
      <button id="pass" type="button">Let the agent continue</button>
    </form>
    <form id="rating-form" hidden>
      <h3>Rate this debate</h3>
      <div id="rating-grid"></div>
      <button id="rate" type="submit" disabled>Submit rating</button>
      <p id="rating-done" hidden>Rating recorded, thank you.</p>
    </form>
  </section>
`;

function ratingGrid(): string {
  return CRITERIA.map(
    (crit) => `
      <fieldset>
        <legend>${crit}</legend>
        ${SCORES.map(
          (s) => `
          <label><input type="radio" name="${crit}" value="${s}" />${s}</label>`,
        ).join("")}
      </fieldset>`,
  ).join("");
}

// ==================== app ====================

export function mountApp(root: HTMLElement, api: DebateApi, win: Window = window): AppHandle {
  root.innerHTML = PAGE;
  const el = {
    banner: root.querySelector<HTMLDivElement>("#banner")!,
    bannerText: root.querySelector<HTMLSpanElement>("#banner-text")!,
    retry: root.querySelector<HTMLButtonElement>("#retry")!,
    startForm: root.querySelector<HTMLFormElement>("#start-form")!,
    subject: root.querySelector<HTMLInputElement>("#subject")!,
    backend: root.querySelector<HTMLSelectElement>("#backend")!,
    start: root.querySelector<HTMLButtonElement>("#start")!,
    debate: root.querySelector<HTMLElement>("#debate")!,
    subjectLine: root.querySelector<HTMLHeadingElement>("#subject-line")!,
    turns: root.querySelector<HTMLDivElement>("#turns")!,
    unkNote: root.querySelector<HTMLParagraphElement>("#unk-note")!,
    typing: root.querySelector<HTMLDivElement>("#typing")!,
    turnForm: root.querySelector<HTMLFormElement>("#turn-form")!,
    reply: root.querySelector<HTMLInputElement>("#reply")!,
    send: root.querySelector<HTMLButtonElement>("#send")!,
    pass: root.querySelector<HTMLButtonElement>("#pass")!,
    ratingForm: root.querySelector<HTMLFormElement>("#rating-form")!,
    ratingGrid: root.querySelector<HTMLDivElement>("#rating-grid")!,
    rate: root.querySelector<HTMLButtonElement>("#rate")!,
    ratingDone: root.querySelector<HTMLParagraphElement>("#rating-done")!,
  };
  el.ratingGrid.innerHTML = ratingGrid();

  let transcript: TranscriptJson | null = null;
  let busy = false; // one in-flight request at a time
  let thinking = false; // a create/turn request is in flight
  let optimistic: TurnView | null = null; // human bubble shown before the server confirms
  let ratingDone = false;
  let bannerMsg: string | null = null;
  let retryAction: (() => Promise<void>) | null = null;
  let current: Promise<void> = Promise.resolve();

  // ---- rendering ----

  function bubble(turn: TurnView): HTMLElement {
    const div = win.document.createElement("div");
    div.className = `bubble ${turn.side}${turn.speaker === "Human" ? " human" : ""}`;
    const who = win.document.createElement("span");
    who.className = "speaker";
    who.textContent = turn.speaker;
    const text = win.document.createElement("span");
    text.className = "text";
    text.textContent = turn.displayText;
    div.append(who, text);
    return div;
  }

  function shownView(): TranscriptView | null {
    if (!transcript) return null;
    const view = toView(transcript, thinking);
    if (optimistic) view.turns = [...view.turns, optimistic];
    return view;
  }

  function ratingComplete(): boolean {
    return CRITERIA.every(
      (crit) => el.ratingForm.querySelector(`input[name="${crit}"]:checked`) !== null,
    );
  }

  function render(): void {
    el.banner.hidden = bannerMsg === null;
    el.bannerText.textContent = bannerMsg ?? "";
    el.retry.hidden = retryAction === null;

    const view = shownView();
    el.startForm.hidden = view !== null;
    el.debate.hidden = view === null;
    if (view === null) {
      el.subject.disabled = busy;
      el.backend.disabled = busy;
      el.start.disabled =
        busy || el.subject.value.trim() === "" || el.backend.options.length === 0;
      return;
    }

    el.subjectLine.textContent = view.subject;
    el.turns.replaceChildren(...view.turns.map(bubble));
    el.unkNote.hidden = !hasBlanks(view);
    el.typing.hidden = view.status !== "AgentThinking";

    const awaiting = view.status === "AwaitingHuman" && !busy;
    el.turnForm.hidden = view.status === "Full";
    el.reply.disabled = !awaiting;
    el.send.disabled = !awaiting || el.reply.value.trim() === "";
    el.pass.disabled = !awaiting;

    el.ratingForm.hidden = view.status !== "Full";
    for (const input of el.ratingForm.querySelectorAll("input")) {
      input.disabled = ratingDone || busy;
    }
    el.rate.disabled = ratingDone || busy || !ratingComplete();
    el.ratingDone.hidden = !ratingDone;
  }

  // ---- actions ----

  function describe(err: unknown): string {
    if (err instanceof ApiError) return err.message;
    return "service unreachable";
  }

  function run(action: () => Promise<void>): void {
    if (busy) return;
    busy = true;
    bannerMsg = null;
    retryAction = null;
    current = action()
      .catch((err) => {
        // actions handle their own failures; anything here is a bug
        bannerMsg = describe(err);
      })
      .finally(() => {
        busy = false;
        thinking = false;
        render();
      });
    render();
  }

  function startDebate(): void {
    const subject = el.subject.value.trim();
    if (subject === "" || el.backend.value === "") return;
    run(async () => {
      thinking = true;
      render();
      try {
        const created = await api.createDebate(subject, el.backend.value, TARGET_TURNS);
        transcript = created.transcript;
        const params = new URLSearchParams(win.location.search);
        params.set("debate", created.debate_id);
        win.history.replaceState(null, "", `?${params}`);
      } catch (err) {
        bannerMsg = describe(err);
      }
    });
  }

  function takeTurn(text: string | undefined): void {
    if (!transcript) return;
    const id = transcript.debate_id;
    run(async () => {
      thinking = true;
      if (text !== undefined) {
        optimistic = {
          speaker: "Human",
          displayText: text,
          side: sideForTurn(transcript!.turns.length),
        };
        el.reply.value = "";
      }
      render();
      try {
        transcript = await api.postTurn(id, text);
        optimistic = null;
      } catch (err) {
        optimistic = null;
        if (err instanceof ApiError && err.status === 409) {
          // the debate filled up under us; resync so the view shows Full
          try {
            transcript = await api.getDebate(id);
          } catch {
            // keep the stale transcript, the banner already explains
          }
          bannerMsg = err.message;
        } else if (!(err instanceof ApiError) || err.status === 502) {
          // the turn was not recorded; give the text back and offer a retry
          if (text !== undefined) el.reply.value = text;
          bannerMsg = describe(err);
          retryAction = async () => takeTurn(text);
        } else {
          bannerMsg = err.message;
        }
      }
    });
  }

  function submitRating(): void {
    if (!transcript || ratingDone || !ratingComplete()) return;
    const id = transcript.debate_id;
    const rating = Object.fromEntries(
      CRITERIA.map((crit) => {
        const checked = el.ratingForm.querySelector<HTMLInputElement>(
          `input[name="${crit}"]:checked`,
        )!;
        return [crit, Number(checked.value)];
      }),
    ) as unknown as RatingBody;
    run(async () => {
      try {
        await api.postRating(id, rating);
        ratingDone = true;
      } catch (err) {
        bannerMsg = describe(err);
      }
    });
  }

  // ---- wiring ----

  el.subject.addEventListener("input", render);
  el.reply.addEventListener("input", render);
  el.ratingForm.addEventListener("change", render);
  el.startForm.addEventListener("submit", (ev) => {
    ev.preventDefault();
    startDebate();
  });
  el.turnForm.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const text = el.reply.value.trim();
    if (text !== "") takeTurn(text);
  });
  el.pass.addEventListener("click", () => takeTurn(undefined));
  el.ratingForm.addEventListener("submit", (ev) => {
    ev.preventDefault();
    submitRating();
  });
  el.retry.addEventListener("click", () => {
    const action = retryAction;
    retryAction = null;
    if (action) void action();
  });

  const ready = (async () => {
    try {
      const health = await api.health();
      for (const name of health.backends) {
        const opt = win.document.createElement("option");
        opt.value = name;
        opt.textContent = name;
        el.backend.append(opt);
      }
    } catch (err) {
      bannerMsg = describe(err);
    }
    const wanted = new URLSearchParams(win.location.search).get("debate");
    if (wanted) {
      try {
        transcript = await api.getDebate(wanted);
      } catch (err) {
        bannerMsg = describe(err);
      }
    }
    render();
  })();

  render();
  return {
    ready,
    whenIdle: async () => {
      await ready;
      let seen: Promise<void>;
      do {
        seen = current;
        await seen;
      } while (seen !== current);
    },
  };
}
