// Browser bootstrap: a create form, poll-based refresh, click-to-move.
// One request in flight per session; the server view is always authoritative.

import { ApiError, SessionApi } from "./api.js";
import { render, renderError } from "./view.js";
import type { ViewState } from "./types.js";

const POLL_MS = 1500;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

export function start(): void {
  const api = new SessionApi("");
  const app = el<HTMLDivElement>("app");
  const errorBox = el<HTMLDivElement>("errors");
  let view: ViewState | null = null;
  let busy = false;
  let timer: number | undefined;

  function show(next: ViewState): void {
    view = next;
    app.innerHTML = render(next);
    for (const button of app.querySelectorAll<HTMLButtonElement>(".move-btn")) {
      button.addEventListener("click", () => submit(button.dataset.move ?? ""));
    }
    if (next.finished && timer !== undefined) {
      window.clearInterval(timer);
      timer = undefined;
    }
  }

  function fail(message: string): void {
    errorBox.innerHTML = renderError(message);
  }

  async function submit(move: string): Promise<void> {
    if (!view || busy) return; // second submit of a race is dropped
    busy = true;
    errorBox.innerHTML = "";
    try {
      show(await api.postMove(view.id, move));
    } catch (exc) {
      fail(exc instanceof ApiError ? exc.detail : String(exc));
      if (view) {
        try {
          show(await api.getView(view.id)); // reconcile from the server
        } catch {
          /* keep the last view */
        }
      }
    } finally {
      busy = false;
    }
  }

  async function poll(): Promise<void> {
    if (!view || busy || view.finished) return;
    try {
      const fresh = await api.getView(view.id);
      if (JSON.stringify(fresh) !== JSON.stringify(view)) show(fresh);
    } catch {
      /* transient poll errors are ignored */
    }
  }

  el<HTMLFormElement>("create-form").addEventListener("submit", async (event) => {
    event.preventDefault();
    errorBox.innerHTML = "";
    const formula = el<HTMLInputElement>("formula").value;
    const mode = el<HTMLSelectElement>("mode").value as
      | "auto"
      | "work"
      | "counterwork";
    try {
      show(await api.createSession({ formula, mode }));
      if (timer === undefined) {
        timer = window.setInterval(poll, POLL_MS);
      }
    } catch (exc) {
      fail(exc instanceof ApiError ? exc.detail : String(exc));
    }
  });
}

if (typeof document !== "undefined" && document.getElementById("create-form")) {
  start();
}
