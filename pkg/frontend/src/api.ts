import type {
  ApiError,
  FetchResult,
  ModelInfoResponse,
  PrioritizeResponse,
} from "./types.js";

/** The two read endpoints the dashboard consumes. */
export interface PrioritizeApi {
  fetchPrioritized(user: string): Promise<FetchResult<PrioritizeResponse>>;
  fetchModelInfo(): Promise<FetchResult<ModelInfoResponse>>;
}

/** Thin fetch-based client. */
export class ApiClient implements PrioritizeApi {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  async fetchPrioritized(user: string): Promise<FetchResult<PrioritizeResponse>> {
    return this.get<PrioritizeResponse>(
      `/api/v1/prioritize?user=${encodeURIComponent(user)}`,
    );
  }

  async fetchModelInfo(): Promise<FetchResult<ModelInfoResponse>> {
    return this.get<ModelInfoResponse>("/api/v1/model/info");
  }

  private async get<T>(path: string): Promise<FetchResult<T>> {
    let response: Response;
    try {
      response = await this.fetchFn(`${this.baseUrl}${path}`);
    } catch {
      return {
        ok: false,
        error: { status: 0, message: "service unreachable", retryable: true },
      };
    }
    if (!response.ok) {
      return { ok: false, error: await toApiError(response) };
    }
    return { ok: true, payload: (await response.json()) as T };
  }
}

async function toApiError(response: Response): Promise<ApiError> {
  let message = `request failed (HTTP ${response.status})`;
  try {
    const body = (await response.json()) as { error?: string };
    if (body && typeof body.error === "string") {
      message = body.error;
    }
  } catch {
    // non-JSON error body; keep the generic message
  }
  return {
    status: response.status,
    message,
    retryable: response.status === 502 || response.status === 503,
  };
}
