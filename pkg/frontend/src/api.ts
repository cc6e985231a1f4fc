/** Typed client for the analysis service.
 *
 * Every response is validated before it reaches the view; anything the
 * service sends that does not match the wire contract becomes an
 * ApiError carrying the raw payload so the UI can show it verbatim.
 */

import type {
  AnalysisDocument,
  AnalyzeResponse,
  Box,
  ConfigOverrides,
  SessionPayload,
  UploadResponse,
} from "./types";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    readonly detail: string,
    /** Raw response body, for the "view raw" error panel. */
    readonly raw: string,
  ) {
    super(`${code}: ${detail}`);
    this.name = "ApiError";
  }

  /** Backend failures are transient; validation errors are not. */
  get retryable(): boolean {
    return this.status === 503;
  }
}

function isRecord(v: unknown): v is Record<string, unknown> {
  return typeof v === "object" && v !== null && !Array.isArray(v);
}

async function errorFrom(resp: Response): Promise<ApiError> {
  const raw = await resp.text();
  try {
    const body: unknown = JSON.parse(raw);
    if (isRecord(body) && typeof body.error === "string") {
      return new ApiError(resp.status, body.error, String(body.detail ?? ""), raw);
    }
  } catch {
    // fall through to the generic error below
  }
  return new ApiError(resp.status, "http_error", `unexpected response ${resp.status}`, raw);
}

function malformed(detail: string, payload: unknown): ApiError {
  const raw = JSON.stringify(payload, null, 2) ?? String(payload);
  return new ApiError(200, "malformed_payload", detail, raw);
}

function checkDocument(doc: unknown, context: unknown): AnalysisDocument {
  if (!isRecord(doc)) throw malformed("document is not an object", context);
  for (const key of ["image", "per_box", "skeleton", "thickness_profiles", "findings"]) {
    if (!(key in doc)) throw malformed(`document is missing "${key}"`, context);
  }
  const skeleton = doc.skeleton;
  if (!isRecord(skeleton) || !Array.isArray(skeleton.segments) || !Array.isArray(skeleton.nodes)) {
    throw malformed("document.skeleton is not a node/segment graph", context);
  }
  if (!Array.isArray(doc.findings) || !Array.isArray(doc.per_box)) {
    throw malformed("document findings/per_box are not arrays", context);
  }
  return doc as unknown as AnalysisDocument;
}

function checkSession(payload: unknown): SessionPayload {
  if (!isRecord(payload) || typeof payload.sessionId !== "string") {
    throw malformed("session payload has no sessionId", payload);
  }
  const status = payload.status;
  if (status !== "pending" && status !== "done" && status !== "failed") {
    throw malformed(`unknown session status ${JSON.stringify(status)}`, payload);
  }
  if (status === "done") {
    checkDocument(payload.document, payload);
    if (!isRecord(payload.artifacts)) throw malformed("done session has no artifacts", payload);
  }
  return payload as unknown as SessionPayload;
}

/** Translate slider names to the wire's config keys, dropping unset ones. */
export function wireConfig(config: ConfigOverrides): Record<string, number> {
  const wire: Record<string, number> = {};
  if (config.minChangeThreshold !== undefined) {
    wire.min_change_threshold = config.minChangeThreshold;
  }
  if (config.probabilityThreshold !== undefined) {
    wire.probability_threshold = config.probabilityThreshold;
  }
  return wire;
}

export interface PollOptions {
  intervalMs?: number;
  timeoutMs?: number;
  sleep?: (ms: number) => Promise<void>;
}

export class ApiClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.base = baseUrl.replace(/\/+$/, "");
    // bind so a bare `fetch` keeps its global receiver
    this.fetchImpl = fetchImpl ?? ((url, init) => fetch(url, init));
  }

  private async json<T>(resp: Response, check: (v: unknown) => T): Promise<T> {
    if (!resp.ok) throw await errorFrom(resp);
    const raw = await resp.text();
    let body: unknown;
    try {
      body = JSON.parse(raw);
    } catch {
      throw new ApiError(resp.status, "malformed_payload", "response is not JSON", raw);
    }
    return check(body);
  }

  async uploadImage(bytes: Uint8Array | Blob): Promise<UploadResponse> {
    const body = bytes instanceof Blob ? bytes : new Blob([bytes as BlobPart]);
    const resp = await this.fetchImpl(`${this.base}/api/images`, {
      method: "POST",
      headers: { "content-type": "application/octet-stream" },
      body,
    });
    return this.json(resp, (v) => {
      if (!isRecord(v) || typeof v.imageId !== "string"
          || typeof v.width !== "number" || typeof v.height !== "number") {
        throw malformed("upload response is missing imageId/width/height", v);
      }
      return v as unknown as UploadResponse;
    });
  }

  async startAnalysis(imageId: string, boxes: Box[],
                      config: ConfigOverrides = {}): Promise<AnalyzeResponse> {
    const resp = await this.fetchImpl(`${this.base}/api/images/${imageId}/analyze`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ boxes, config: wireConfig(config) }),
    });
    return this.json(resp, (v) => {
      if (!isRecord(v) || typeof v.sessionId !== "string" || typeof v.status !== "string") {
        throw malformed("analyze response is missing sessionId/status", v);
      }
      return v as unknown as AnalyzeResponse;
    });
  }

  async getSession(sessionId: string): Promise<SessionPayload> {
    const resp = await this.fetchImpl(`${this.base}/api/sessions/${sessionId}`);
    return this.json(resp, checkSession);
  }

  async pollSession(sessionId: string, opts: PollOptions = {}): Promise<SessionPayload> {
    const interval = opts.intervalMs ?? 200;
    const timeout = opts.timeoutMs ?? 60_000;
    const sleep = opts.sleep ?? ((ms) => new Promise((r) => setTimeout(r, ms)));
    const deadline = Date.now() + timeout;
    for (;;) {
      const payload = await this.getSession(sessionId);
      if (payload.status !== "pending") return payload;
      if (Date.now() >= deadline) {
        throw new ApiError(0, "poll_timeout", `session ${sessionId} still pending`, "");
      }
      await sleep(interval);
    }
  }

  async healthz(): Promise<{ status: string; backend: string }> {
    const resp = await this.fetchImpl(`${this.base}/healthz`);
    return this.json(resp, (v) => {
      if (!isRecord(v) || typeof v.status !== "string") {
        throw malformed("health response has no status", v);
      }
      return v as { status: string; backend: string };
    });
  }
}
