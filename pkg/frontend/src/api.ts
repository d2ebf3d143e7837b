import type { CreateRequest, ViewState } from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`${status}: ${detail}`);
  }
}

type Fetch = typeof fetch;

export class SessionApi {
  constructor(
    private baseUrl: string,
    private fetchImpl: Fetch = fetch,
  ) {}

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      const detail =
        typeof (body as { detail?: unknown }).detail === "string"
          ? (body as { detail: string }).detail
          : response.statusText;
      throw new ApiError(response.status, detail);
    }
    return body;
  }

  createSession(request: CreateRequest): Promise<ViewState> {
    return this.request("/session", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(request),
    }) as Promise<ViewState>;
  }

  getView(sessionId: string): Promise<ViewState> {
    return this.request(`/session/${sessionId}`) as Promise<ViewState>;
  }

  async getLegal(sessionId: string): Promise<string[]> {
    const body = (await this.request(`/session/${sessionId}/legal`)) as {
      moves: string[];
    };
    return body.moves;
  }

  postMove(sessionId: string, move: string): Promise<ViewState> {
    return this.request(`/session/${sessionId}/move`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ move }),
    }) as Promise<ViewState>;
  }
}
