import { describe, expect, it } from "vitest";

import { ApiError, SessionApi } from "../src/api.js";

function fakeFetch(
  handler: (url: string, init?: RequestInit) => { status: number; body: unknown },
): typeof fetch {
  return (async (url: RequestInfo | URL, init?: RequestInit) => {
    const { status, body } = handler(String(url), init);
    return {
      ok: status >= 200 && status < 300,
      status,
      statusText: `status ${status}`,
      json: async () => body,
    } as Response;
  }) as typeof fetch;
}

describe("SessionApi", () => {
  it("posts the create payload to /session", async () => {
    let seen: { url?: string; body?: string } = {};
    const api = new SessionApi(
      "http://x",
      fakeFetch((url, init) => {
        seen = { url, body: init?.body as string };
        return { status: 200, body: { id: "s1" } };
      }),
    );
    const view = await api.createSession({ formula: "~p | p" });
    expect(seen.url).toBe("http://x/session");
    expect(JSON.parse(seen.body!)).toEqual({ formula: "~p | p" });
    expect(view.id).toBe("s1");
  });

  it("surfaces 422 details verbatim", async () => {
    const api = new SessionApi(
      "",
      fakeFetch(() => ({ status: 422, body: { detail: "illegal move '9'" } })),
    );
    await expect(api.postMove("s1", "9")).rejects.toThrowError(
      /illegal move '9'/,
    );
  });

  it("wraps other failures in ApiError with the status", async () => {
    const api = new SessionApi(
      "",
      fakeFetch(() => ({ status: 404, body: {} })),
    );
    const failure = await api.getView("nope").catch((e) => e);
    expect(failure).toBeInstanceOf(ApiError);
    expect((failure as ApiError).status).toBe(404);
  });

  it("unwraps the legal move list", async () => {
    const api = new SessionApi(
      "",
      fakeFetch(() => ({ status: 200, body: { moves: ["1.1", "2"] } })),
    );
    expect(await api.getLegal("s1")).toEqual(["1.1", "2"]);
  });
});
