/** Explorer application: wires the action log, API client, and DOM.

The draft shown on screen is always replay(history): every user
gesture appends an Action and the chip row is re-rendered from
scratch. Query submission is explicit; at most one request is in
flight and a newer submission aborts the older one.
*/

import { ApiClient, ApiError } from "./api.js";
import { debounce, suggest } from "./autocomplete.js";
import {
  type Action,
  canSubmit,
  draftToRequest,
  replay,
} from "./state.js";
import {
  clearError,
  renderChips,
  renderError,
  renderResults,
} from "./render.js";
import type { ItemDetail, QueryDraft, ResultItem } from "./types.js";

export interface AppElements {
  input: HTMLInputElement;
  suggestions: HTMLUListElement;
  chips: HTMLElement;
  k: HTMLInputElement;
  submit: HTMLButtonElement;
  status: HTMLElement;
  error: HTMLElement;
  results: HTMLElement;
}

export interface App {
  els: AppElements;
  history: readonly Action[];
  draft(): QueryDraft;
  dispatch(action: Action): void;
  submit(): Promise<void>;
  idle(): Promise<void>;
}

function build(root: HTMLElement): AppElements {
  root.innerHTML = "";

  const bar = document.createElement("div");
  bar.className = "query-bar";

  const input = document.createElement("input");
  input.type = "text";
  input.className = "term-input";
  input.placeholder = "add a term";
  input.setAttribute("aria-label", "query term");
  bar.appendChild(input);

  const suggestions = document.createElement("ul");
  suggestions.className = "suggestions";
  bar.appendChild(suggestions);

  const kLabel = document.createElement("label");
  kLabel.className = "k-label";
  kLabel.textContent = "results";
  const k = document.createElement("input");
  k.type = "number";
  k.className = "k-input";
  k.min = "1";
  k.value = "12";
  kLabel.appendChild(k);
  bar.appendChild(kLabel);

  const submit = document.createElement("button");
  submit.type = "button";
  submit.className = "submit-query";
  submit.textContent = "search";
  bar.appendChild(submit);

  root.appendChild(bar);

  const chips = document.createElement("div");
  chips.className = "chip-row";
  root.appendChild(chips);

  const status = document.createElement("div");
  status.className = "status-line";
  root.appendChild(status);

  const error = document.createElement("div");
  error.className = "error-area";
  root.appendChild(error);

  const results = document.createElement("div");
  results.className = "results";
  root.appendChild(results);

  return { input, suggestions, chips, k, submit, status, error, results };
}

export function createApp(root: HTMLElement, client: ApiClient): App {
  const els = build(root);
  const history: Action[] = [];

  let inflight: AbortController | null = null;
  let pending: Promise<void> = Promise.resolve();

  const draft = (): QueryDraft => replay(history);

  function renderDraft(): void {
    const current = draft();
    renderChips(els.chips, current, {
      onRemove: (index) => dispatch({ type: "remove_chip", index }),
      onWeight: (index, weight) =>
        dispatch({ type: "set_weight", index, weight }),
    });
    if (document.activeElement !== els.k) {
      els.k.value = String(current.k);
    }
    els.submit.disabled = !canSubmit(current);
  }

  function dispatch(action: Action): void {
    history.push(action);
    renderDraft();
  }

  function clearSuggestions(): void {
    els.suggestions.innerHTML = "";
  }

  function showSuggestions(tokens: string[]): void {
    clearSuggestions();
    for (const token of tokens) {
      const li = document.createElement("li");
      const btn = document.createElement("button");
      btn.type = "button";
      btn.className = "suggestion";
      btn.textContent = token;
      btn.addEventListener("click", () => {
        dispatch({ type: "add_text", value: token });
        els.input.value = "";
        clearSuggestions();
      });
      li.appendChild(btn);
      els.suggestions.appendChild(li);
    }
  }

  const refreshSuggestions = debounce((prefix: string) => {
    pending = pending
      .then(() => suggest(client, prefix))
      .then((tokens) => {
        // stale responses for an emptied input are dropped
        if (els.input.value.trim().toLowerCase() === prefix) {
          showSuggestions(tokens);
        }
      });
  }, 150);

  async function runQuery(): Promise<void> {
    const current = draft();
    if (!canSubmit(current)) return;

    inflight?.abort();
    const controller = new AbortController();
    inflight = controller;

    clearError(els.error);
    els.status.textContent = "searching…";

    let results: ResultItem[];
    let dropped: string[];
    try {
      const body = await client.query(draftToRequest(current), controller.signal);
      results = body.results;
      dropped = body.dropped_tokens;
    } catch (err) {
      if (controller.signal.aborted) return;
      els.status.textContent = "";
      if (err instanceof ApiError) {
        renderError(els.error, err.reason, err.message);
      } else {
        renderError(els.error, "network", "request failed; server unreachable",
          () => void submit());
      }
      return;
    }
    if (controller.signal.aborted) return;

    const details = new Map<string, ItemDetail | null>();
    const fetched = await Promise.all(
      results.map((r) => client.item(r.id).catch(() => null)),
    );
    if (controller.signal.aborted) return;
    results.forEach((r, i) => details.set(r.id, fetched[i] ?? null));

    renderResults(els.results, results, details, {
      onBias: (imageId, sign) => dispatch({ type: "add_image", imageId, sign }),
    });
    const parts = [`${results.length} results`];
    if (dropped.length > 0) parts.push(`ignored: ${dropped.join(", ")}`);
    els.status.textContent = parts.join(" · ");
  }

  function submit(): Promise<void> {
    const run = runQuery();
    pending = pending.then(() => run);
    return run;
  }

  els.input.addEventListener("input", () => {
    refreshSuggestions(els.input.value.trim().toLowerCase());
  });
  els.input.addEventListener("keydown", (event) => {
    if ((event as KeyboardEvent).key === "Enter") {
      const value = els.input.value;
      if (value.trim()) {
        dispatch({ type: "add_text", value });
        els.input.value = "";
        clearSuggestions();
      }
    }
  });
  els.k.addEventListener("change", () => {
    dispatch({ type: "set_k", k: Number(els.k.value) });
  });
  els.submit.addEventListener("click", () => void submit());

  renderDraft();

  return {
    els,
    history,
    draft,
    dispatch,
    submit,
    idle: () => pending,
  };
}

// browser bootstrap; absent in tests, which build their own root
const mount = typeof document !== "undefined"
  ? document.getElementById("app")
  : null;
if (mount) {
  createApp(mount, new ApiClient());
}
