/** Thin typed client over the engine's HTTP API.

All rankings and scores come from these responses; the UI performs no
score arithmetic of its own.
*/

import type {
  HealthResponse,
  ItemDetail,
  QueryRequestBody,
  QueryResponse,
  VocabResponse,
} from "./types.js";

/** Error carrying the service's machine-readable reason. */
export class ApiError extends Error {
  constructor(
    public status: number,
    public reason: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function raise(response: Response): Promise<never> {
  let reason = "unknown";
  let message = response.statusText;
  try {
    const body = (await response.json()) as { reason?: string; message?: string };
    if (body.reason) reason = body.reason;
    if (body.message) message = body.message;
  } catch {
    // non-JSON error body: keep the status text
  }
  throw new ApiError(response.status, reason, message);
}

export class ApiClient {
  constructor(
    private base: string = "",
    private fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  async query(body: QueryRequestBody, signal?: AbortSignal): Promise<QueryResponse> {
    const response = await this.fetchFn(`${this.base}/api/query`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
    if (!response.ok) await raise(response);
    return (await response.json()) as QueryResponse;
  }

  async vocab(prefix: string, limit = 50): Promise<VocabResponse> {
    const params = new URLSearchParams({ prefix, limit: String(limit) });
    const response = await this.fetchFn(`${this.base}/api/vocab?${params}`);
    if (!response.ok) await raise(response);
    return (await response.json()) as VocabResponse;
  }

  async item(id: string): Promise<ItemDetail> {
    const response = await this.fetchFn(`${this.base}/api/items/${encodeURIComponent(id)}`);
    if (!response.ok) await raise(response);
    return (await response.json()) as ItemDetail;
  }

  async health(): Promise<HealthResponse> {
    const response = await this.fetchFn(`${this.base}/api/health`);
    if (!response.ok) await raise(response);
    return (await response.json()) as HealthResponse;
  }
}
