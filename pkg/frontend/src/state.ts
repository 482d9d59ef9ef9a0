/** Draft state as a pure function of the user's action history.

The app never mutates a draft in place: it appends actions to a history
list and re-derives the draft by replay, so any state is reproducible
from the log alone.
*/

import type { Chip, QueryDraft, QueryRequestBody, QueryTermBody } from "./types.js";

export const WEIGHT_MIN = -2;
export const WEIGHT_MAX = 2;
export const DEFAULT_K = 12;

export type Action =
  | { type: "add_text"; value: string }
  | { type: "add_image"; imageId: string; sign: 1 | -1 }
  | { type: "remove_chip"; index: number }
  | { type: "set_weight"; index: number; weight: number }
  | { type: "set_k"; k: number };

export function initialDraft(): QueryDraft {
  return { chips: [], k: DEFAULT_K };
}

export function clampWeight(w: number): number {
  if (!Number.isFinite(w)) return 1;
  return Math.min(WEIGHT_MAX, Math.max(WEIGHT_MIN, w));
}

/** Apply one action; returns a new draft, never mutates the input. */
export function applyAction(draft: QueryDraft, action: Action): QueryDraft {
  switch (action.type) {
    case "add_text": {
      const value = action.value.trim().toLowerCase();
      if (!value) return draft;
      const chip: Chip = { kind: "text", value, weight: 1 };
      return { ...draft, chips: [...draft.chips, chip] };
    }
    case "add_image": {
      const chip: Chip = {
        kind: "image",
        value: action.imageId,
        weight: action.sign,
      };
      return { ...draft, chips: [...draft.chips, chip] };
    }
    case "remove_chip": {
      if (action.index < 0 || action.index >= draft.chips.length) return draft;
      const chips = draft.chips.filter((_, i) => i !== action.index);
      return { ...draft, chips };
    }
    case "set_weight": {
      if (action.index < 0 || action.index >= draft.chips.length) return draft;
      const chips = draft.chips.map((chip, i) =>
        i === action.index ? { ...chip, weight: clampWeight(action.weight) } : chip,
      );
      return { ...draft, chips };
    }
    case "set_k": {
      const k = Math.round(action.k);
      if (!Number.isFinite(k) || k < 1) return draft;
      return { ...draft, k };
    }
  }
}

/** Fold the whole history into a draft. */
export function replay(actions: readonly Action[]): QueryDraft {
  return actions.reduce(applyAction, initialDraft());
}

export function canSubmit(draft: QueryDraft): boolean {
  return draft.chips.length > 0;
}

/** Exact request body for the draft; weights pass through unchanged. */
export function draftToRequest(draft: QueryDraft): QueryRequestBody {
  const terms: QueryTermBody[] = draft.chips.map((chip) =>
    chip.kind === "text"
      ? { text: chip.value, weight: chip.weight }
      : { image_id: chip.value, weight: chip.weight },
  );
  return { terms, k: draft.k };
}
