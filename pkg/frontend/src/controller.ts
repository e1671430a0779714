import type { PrioritizeApi } from "./api.js";
import type { DashboardState } from "./types.js";

/**
 * State machine between the API client and the renderer. One request is in
 * flight at a time; responses arriving for a superseded request are
 * discarded by token, so a slow answer can never overwrite a newer one.
 */
export class DashboardController {
  private token = 0;
  private lastUser: string | null = null;

  constructor(
    private readonly api: PrioritizeApi,
    private readonly onState: (state: DashboardState) => void,
  ) {}

  async start(): Promise<void> {
    const info = await this.api.fetchModelInfo();
    this.onState({ phase: "idle", modelInfo: info.ok ? info.payload : null });
  }

  async submit(user: string): Promise<void> {
    const trimmed = user.trim();
    if (!trimmed) {
      return;
    }
    this.lastUser = trimmed;
    const token = ++this.token;
    this.onState({ phase: "loading", user: trimmed });
    const result = await this.api.fetchPrioritized(trimmed);
    if (token !== this.token) {
      return; // superseded by a newer submit/refresh
    }
    if (result.ok) {
      this.onState({ phase: "loaded", response: result.payload });
    } else {
      this.onState({ phase: "error", user: trimmed, error: result.error });
    }
  }

  async refresh(): Promise<void> {
    if (this.lastUser !== null) {
      await this.submit(this.lastUser);
    }
  }
}
