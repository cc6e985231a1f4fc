import { describe, expect, it } from "vitest";

import { ApiClient, ApiError, wireConfig } from "../src/api";
import type { FetchLike } from "../src/api";

interface RecordedCall {
  url: string;
  init?: RequestInit;
}

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

/** Queue of canned responses that records every request. */
function fakeFetch(responses: Response[]): { fetch: FetchLike; calls: RecordedCall[] } {
  const calls: RecordedCall[] = [];
  const queue = responses.slice();
  return {
    calls,
    fetch: (url, init) => {
      calls.push({ url, init });
      const next = queue.shift();
      if (!next) throw new Error("fake fetch exhausted");
      return Promise.resolve(next);
    },
  };
}

const DONE_SESSION = {
  sessionId: "sess1",
  status: "done",
  document: {
    image: "abc",
    per_box: [],
    skeleton: { nodes: [], segments: [] },
    thickness_profiles: [],
    findings: [],
  },
  artifacts: { "mask.png": "AAAA" },
};

describe("uploadImage", () => {
  it("posts raw bytes and returns the image metadata", async () => {
    const { fetch, calls } = fakeFetch([
      jsonResponse(200, { imageId: "i1", width: 448, height: 386 }),
    ]);
    const client = new ApiClient("http://svc", fetch);
    const meta = await client.uploadImage(new Uint8Array([1, 2, 3]));
    expect(meta).toEqual({ imageId: "i1", width: 448, height: 386 });
    expect(calls[0]?.url).toBe("http://svc/api/images");
    expect(calls[0]?.init?.method).toBe("POST");
  });

  it("rejects an invalid image with the service's error details", async () => {
    const { fetch } = fakeFetch([
      jsonResponse(422, { error: "invalid_image", detail: "not decodable" }),
    ]);
    const client = new ApiClient("http://svc", fetch);
    const err = await client.uploadImage(new Uint8Array([0])).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.code).toBe("invalid_image");
    expect(err.retryable).toBe(false);
  });
});

describe("startAnalysis", () => {
  it("sends boxes untouched and config keys in wire spelling", async () => {
    const { fetch, calls } = fakeFetch([
      jsonResponse(200, { sessionId: "s1", status: "pending" }),
    ]);
    const client = new ApiClient("http://svc", fetch);
    const boxes = [{ x0: 5, y0: 150, x1: 440, y1: 240 }];
    await client.startAnalysis("img1", boxes, {
      minChangeThreshold: 0.4,
      probabilityThreshold: 0.55,
    });
    expect(calls[0]?.url).toBe("http://svc/api/images/img1/analyze");
    const body = JSON.parse(String(calls[0]?.init?.body));
    expect(body.boxes).toEqual(boxes);
    expect(body.config).toEqual({ min_change_threshold: 0.4, probability_threshold: 0.55 });
  });

  it("sends an empty config when no override is set", async () => {
    const { fetch, calls } = fakeFetch([
      jsonResponse(200, { sessionId: "s1", status: "pending" }),
    ]);
    await new ApiClient("http://svc", fetch)
      .startAnalysis("img1", [{ x0: 0, y0: 0, x1: 5, y1: 5 }]);
    expect(JSON.parse(String(calls[0]?.init?.body)).config).toEqual({});
  });

  it("maps a 503 to a retryable error", async () => {
    const { fetch } = fakeFetch([
      jsonResponse(503, { error: "backend_failure", detail: "sidecar down" }),
    ]);
    const err = await new ApiClient("http://svc", fetch)
      .startAnalysis("img1", [{ x0: 0, y0: 0, x1: 5, y1: 5 }])
      .catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.code).toBe("backend_failure");
    expect(err.retryable).toBe(true);
  });

  it("keeps the raw body of a non-JSON error response", async () => {
    const { fetch } = fakeFetch([new Response("<html>bad gateway</html>", { status: 502 })]);
    const err = await new ApiClient("http://svc", fetch)
      .startAnalysis("img1", [{ x0: 0, y0: 0, x1: 5, y1: 5 }])
      .catch((e) => e);
    expect(err.code).toBe("http_error");
    expect(err.raw).toContain("bad gateway");
  });
});

describe("session polling", () => {
  it("repeats until the session leaves pending", async () => {
    const pending = { sessionId: "s1", status: "pending" };
    const { fetch, calls } = fakeFetch([
      jsonResponse(200, pending),
      jsonResponse(200, pending),
      jsonResponse(200, { ...DONE_SESSION, sessionId: "s1" }),
    ]);
    const naps: number[] = [];
    const payload = await new ApiClient("http://svc", fetch).pollSession("s1", {
      intervalMs: 7,
      sleep: (ms) => {
        naps.push(ms);
        return Promise.resolve();
      },
    });
    expect(payload.status).toBe("done");
    expect(calls).toHaveLength(3);
    expect(naps).toEqual([7, 7]);
  });

  it("rejects a done session without a document as malformed", async () => {
    const { fetch } = fakeFetch([
      jsonResponse(200, { sessionId: "s1", status: "done" }),
    ]);
    const err = await new ApiClient("http://svc", fetch).getSession("s1").catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.code).toBe("malformed_payload");
    expect(err.raw).toContain("\"sessionId\": \"s1\"");
  });

  it("preserves the raw text of a non-JSON payload", async () => {
    const { fetch } = fakeFetch([new Response("garbage{{{", { status: 200 })]);
    const err = await new ApiClient("http://svc", fetch).getSession("s1").catch((e) => e);
    expect(err.code).toBe("malformed_payload");
    expect(err.raw).toBe("garbage{{{");
  });

  it("rejects an unknown status value", async () => {
    const { fetch } = fakeFetch([
      jsonResponse(200, { sessionId: "s1", status: "exploded" }),
    ]);
    const err = await new ApiClient("http://svc", fetch).getSession("s1").catch((e) => e);
    expect(err.code).toBe("malformed_payload");
    expect(err.detail).toContain("exploded");
  });

  it("gives up after the timeout", async () => {
    const pending = jsonResponse(200, { sessionId: "s1", status: "pending" });
    const { fetch } = fakeFetch([pending, pending.clone(), pending.clone()]);
    const err = await new ApiClient("http://svc", fetch)
      .pollSession("s1", { intervalMs: 1, timeoutMs: 0, sleep: () => Promise.resolve() })
      .catch((e) => e);
    expect(err.code).toBe("poll_timeout");
  });

  it("surfaces unknown sessions", async () => {
    const { fetch } = fakeFetch([
      jsonResponse(404, { error: "unknown_session", detail: "nope" }),
    ]);
    const err = await new ApiClient("http://svc", fetch).getSession("zzz").catch((e) => e);
    expect(err.code).toBe("unknown_session");
  });
});

describe("wireConfig", () => {
  it("drops unset knobs", () => {
    expect(wireConfig({})).toEqual({});
    expect(wireConfig({ probabilityThreshold: 0.7 }))
      .toEqual({ probability_threshold: 0.7 });
  });
});

describe("healthz", () => {
  it("returns the backend name", async () => {
    const { fetch, calls } = fakeFetch([
      jsonResponse(200, { status: "ok", backend: "threshold" }),
    ]);
    const health = await new ApiClient("http://svc/", fetch).healthz();
    expect(health.backend).toBe("threshold");
    expect(calls[0]?.url).toBe("http://svc/healthz");
  });
});
