/** DOM construction for the explorer: chip row, result cards, errors.

All functions wipe and repopulate their container so the markup is a
pure projection of the data passed in; nothing here keeps state.
*/

import type { Chip, ItemDetail, QueryDraft, ResultItem } from "./types.js";
import { WEIGHT_MAX, WEIGHT_MIN } from "./state.js";

export interface ChipHandlers {
  onRemove: (index: number) => void;
  onWeight: (index: number, weight: number) => void;
}

export interface ResultHandlers {
  onBias: (imageId: string, sign: 1 | -1) => void;
}

function clear(el: HTMLElement): void {
  while (el.firstChild) el.removeChild(el.firstChild);
}

function chipLabel(chip: Chip): string {
  return chip.kind === "image" ? `img:${chip.value}` : chip.value;
}

/** Render the draft's chips with per-chip weight sliders and remove buttons. */
export function renderChips(
  container: HTMLElement,
  draft: QueryDraft,
  handlers: ChipHandlers,
): void {
  clear(container);
  draft.chips.forEach((chip, index) => {
    const el = document.createElement("span");
    el.className = `chip chip-${chip.kind}`;
    el.dataset.kind = chip.kind;
    el.dataset.value = chip.value;

    const label = document.createElement("span");
    label.className = "chip-label";
    label.textContent = chipLabel(chip);
    el.appendChild(label);

    const weight = document.createElement("input");
    weight.type = "range";
    weight.className = "chip-weight";
    weight.min = String(WEIGHT_MIN);
    weight.max = String(WEIGHT_MAX);
    weight.step = "0.1";
    weight.value = String(chip.weight);
    weight.setAttribute("aria-label", `weight for ${chipLabel(chip)}`);
    weight.addEventListener("input", () => {
      handlers.onWeight(index, Number(weight.value));
    });
    el.appendChild(weight);

    const readout = document.createElement("span");
    readout.className = "chip-weight-readout";
    readout.textContent = chip.weight.toFixed(1);
    el.appendChild(readout);

    const remove = document.createElement("button");
    remove.type = "button";
    remove.className = "chip-remove";
    remove.textContent = "×";
    remove.setAttribute("aria-label", `remove ${chipLabel(chip)}`);
    remove.addEventListener("click", () => handlers.onRemove(index));
    el.appendChild(remove);

    container.appendChild(el);
  });
}

/** Render result cards in the exact order the server returned them.

Scores are shown verbatim to three decimals; no re-sorting or
re-scoring happens client side.
*/
export function renderResults(
  container: HTMLElement,
  results: ResultItem[],
  details: Map<string, ItemDetail | null>,
  handlers: ResultHandlers,
): void {
  clear(container);
  for (const result of results) {
    const card = document.createElement("article");
    card.className = "result-card";
    card.dataset.id = result.id;

    const detail = details.get(result.id) ?? null;
    if (detail && detail.image_url) {
      const img = document.createElement("img");
      img.className = "result-thumb";
      img.src = detail.image_url;
      img.alt = detail.caption || result.id;
      card.appendChild(img);
    }

    const head = document.createElement("header");
    head.className = "result-head";

    const idEl = document.createElement("span");
    idEl.className = "result-id";
    idEl.textContent = result.id;
    head.appendChild(idEl);

    const scoreEl = document.createElement("span");
    scoreEl.className = "result-score";
    scoreEl.textContent = result.score.toFixed(3);
    head.appendChild(scoreEl);

    card.appendChild(head);

    if (detail) {
      if (detail.caption) {
        const cap = document.createElement("p");
        cap.className = "result-caption";
        cap.textContent = detail.caption;
        card.appendChild(cap);
      }
      const tagText = detail.tags.join(", ");
      if (tagText) {
        const tags = document.createElement("p");
        tags.className = "result-tags";
        tags.textContent = tagText;
        card.appendChild(tags);
      }
    }

    const actions = document.createElement("div");
    actions.className = "result-actions";

    const more = document.createElement("button");
    more.type = "button";
    more.className = "bias-more";
    more.textContent = "more like this";
    more.addEventListener("click", () => handlers.onBias(result.id, 1));
    actions.appendChild(more);

    const less = document.createElement("button");
    less.type = "button";
    less.className = "bias-less";
    less.textContent = "less like this";
    less.addEventListener("click", () => handlers.onBias(result.id, -1));
    actions.appendChild(less);

    card.appendChild(actions);
    container.appendChild(card);
  }
}

/** Render an inline error notice.

Network failures get a retry button; structured rejections (degenerate
or unembeddable queries) get an explanation and leave the draft alone.
*/
export function renderError(
  container: HTMLElement,
  reason: string,
  message: string,
  onRetry?: () => void,
): void {
  clear(container);
  const box = document.createElement("div");
  box.className = "error-box";
  box.dataset.reason = reason;

  const text = document.createElement("p");
  text.className = "error-message";
  text.textContent = message;
  box.appendChild(text);

  if (onRetry) {
    const retry = document.createElement("button");
    retry.type = "button";
    retry.className = "error-retry";
    retry.textContent = "retry";
    retry.addEventListener("click", onRetry);
    box.appendChild(retry);
  }

  container.appendChild(box);
}

export function clearError(container: HTMLElement): void {
  clear(container);
}
