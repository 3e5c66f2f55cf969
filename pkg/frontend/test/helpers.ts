/** Shared jsdom plumbing: mount the app against a FakeService and drive it. */

import { createApi, type DebateApi } from "../src/api.js";
import { mountApp, type AppHandle } from "../src/app.js";
import { FakeService } from "./fake-service.js";

export interface Harness {
  service: FakeService;
  api: DebateApi;
  handle: AppHandle;
  root: HTMLElement;
}

export async function mount(
  service: FakeService = new FakeService(),
  opts: { url?: string; fetchFn?: typeof fetch } = {},
): Promise<Harness> {
  history.replaceState(null, "", opts.url ?? "/");
  document.body.innerHTML = '<main id="app"></main>';
  const root = document.getElementById("app")!;
  const api = createApi("", opts.fetchFn ?? service.fetch);
  const handle = mountApp(root, api);
  await handle.ready;
  return { service, api, handle, root };
}

export function q<T extends HTMLElement>(selector: string): T {
  const node = document.querySelector<T>(selector);
  if (!node) throw new Error(`missing element ${selector}`);
  return node;
}

export function setValue(input: HTMLInputElement, value: string): void {
  input.value = value;
  input.dispatchEvent(new Event("input", { bubbles: true }));
}

export function submit(form: HTMLFormElement): void {
  form.dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
}

export function bubbles(): HTMLElement[] {
  return [...document.querySelectorAll<HTMLElement>(".bubble")];
}

export async function startDebate(h: Harness, subject: string): Promise<void> {
  setValue(q("#subject"), subject);
  submit(q("#start-form"));
  await h.handle.whenIdle();
}

export async function sendReply(h: Harness, text: string): Promise<void> {
  setValue(q("#reply"), text);
  submit(q("#turn-form"));
  await h.handle.whenIdle();
}

export async function passTurn(h: Harness): Promise<void> {
  q("#pass").click();
  await h.handle.whenIdle();
}

export function pickScore(criterion: string, score: number): void {
  const radio = q<HTMLInputElement>(
    `#rating-form input[name="${criterion}"][value="${score}"]`,
  );
  radio.checked = true;
  radio.dispatchEvent(new Event("change", { bubbles: true }));
}
