/** Wire types of the retrieval API plus the client-side draft model. */

export type ChipKind = "text" | "image";

/** One query term chip; weight is the slider value, sent verbatim. */
export interface Chip {
  kind: ChipKind;
  value: string;
  weight: number;
}

/** The whole editable query state. */
export interface QueryDraft {
  chips: Chip[];
  k: number;
}

export interface QueryTermBody {
  text?: string;
  image_id?: string;
  weight: number;
}

export interface QueryRequestBody {
  terms: QueryTermBody[];
  k: number;
}

export interface ResultItem {
  id: string;
  score: number;
}

export interface QueryResponse {
  results: ResultItem[];
  dropped_tokens: string[];
}

export interface ItemDetail {
  id: string;
  caption: string;
  tags: string[];
  labels: string[] | null;
  split: string;
  image_url: string | null;
  indexed: boolean;
}

export interface VocabResponse {
  tokens: string[];
  total: number;
}

export interface HealthResponse {
  status: string;
  kernel_backend: string;
  n_items: number;
  vocab_size: number;
  dim: number;
  method: string;
}
