/** Wire types for the prioritization API (GET /api/v1/prioritize, /api/v1/model/info). */

export interface PrioritizedItemPayload {
  rank: number;
  change_id: string;
  subject: string;
  change_type: "TroubleReport" | "Feature" | "Refactoring";
  merge_conflict: "Yes" | "No";
  merge_probability: number;
  age_minutes: number;
  degraded: boolean;
}

export interface PrioritizeResponse {
  user: string;
  model_trained_at: string;
  items: PrioritizedItemPayload[];
}

export interface ModelInfoResponse {
  model: {
    trained_at: string;
    training_rows: number;
    smoothing_alpha: number;
    variables: string[];
    edges: string[][];
  } | null;
}

export interface ApiError {
  status: number;
  message: string;
  retryable: boolean;
}

export type FetchResult<T> = { ok: true; payload: T } | { ok: false; error: ApiError };

/** What the dashboard shows; rendering is a pure function of this value. */
export type DashboardState =
  | { phase: "idle"; modelInfo: ModelInfoResponse | null }
  | { phase: "loading"; user: string }
  | { phase: "loaded"; response: PrioritizeResponse }
  | { phase: "error"; user: string; error: ApiError };
