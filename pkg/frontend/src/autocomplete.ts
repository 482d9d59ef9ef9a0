/** Debounced in-vocabulary suggestions for the query input. */

import type { ApiClient } from "./api.js";

export const MIN_PREFIX = 2;

/** Trailing-edge debounce. */
export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  ms: number,
): (...args: A) => void {
  let timer: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    if (timer !== undefined) clearTimeout(timer);
    timer = setTimeout(() => fn(...args), ms);
  };
}

/** Vocabulary tokens starting with the prefix.

Prefixes shorter than MIN_PREFIX never hit the network; endpoint
failures degrade silently to an empty list so free-text entry still
works.
*/
export async function suggest(
  client: ApiClient,
  prefix: string,
  limit = 8,
): Promise<string[]> {
  const trimmed = prefix.trim().toLowerCase();
  if (trimmed.length < MIN_PREFIX) return [];
  try {
    const body = await client.vocab(trimmed, limit);
    return body.tokens;
  } catch {
    return [];
  }
}
