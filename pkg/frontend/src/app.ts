/** Controller gluing the API client to the view state.
 *
 * Enforces the client-side invariants: submission needs an uploaded
 * image and at least one box, and each image has at most one analysis
 * in flight at a time.  Server rejections and transport errors become
 * inline errors; the drawn boxes are never touched by a failure.
 */

import { ApiClient, ApiError } from "./api";
import type { PollOptions } from "./api";
import {
  beginSubmit,
  canSubmit,
  createViewState,
  setImage,
  submitFailed,
  submitSucceeded,
} from "./state";
import type { InlineError, ViewState } from "./state";

export interface AnalysisApi {
  uploadImage: ApiClient["uploadImage"];
  startAnalysis: ApiClient["startAnalysis"];
  pollSession: ApiClient["pollSession"];
}

function inlineErrorFrom(err: unknown): InlineError {
  if (err instanceof ApiError) {
    return { code: err.code, detail: err.detail, raw: err.raw, retryable: err.retryable };
  }
  const detail = err instanceof Error ? err.message : String(err);
  return { code: "client_error", detail, raw: "", retryable: false };
}

export class ReviewApp {
  state: ViewState = createViewState();

  private readonly inFlightImages = new Set<string>();

  constructor(
    private readonly api: AnalysisApi,
    private readonly onChange: (state: ViewState) => void = () => {},
    private readonly pollOptions: PollOptions = {},
  ) {}

  private commit(state: ViewState): void {
    this.state = state;
    this.onChange(state);
  }

  /** Upload raw image bytes; a fresh image resets boxes and results. */
  async loadImage(bytes: Uint8Array | Blob): Promise<void> {
    try {
      const meta = await this.api.uploadImage(bytes);
      this.commit(setImage(this.state, meta));
    } catch (err) {
      this.commit(submitFailed(this.state, inlineErrorFrom(err)));
    }
  }

  /** Run one analysis over the current boxes.  No-op while another
   * analysis for this image is in flight or preconditions fail. */
  async submit(): Promise<void> {
    const image = this.state.image;
    if (!image || !canSubmit(this.state) || this.inFlightImages.has(image.imageId)) return;

    this.inFlightImages.add(image.imageId);
    this.commit(beginSubmit(this.state));
    try {
      const { sessionId } = await this.api.startAnalysis(
        image.imageId, this.state.boxes, this.state.config);
      const payload = await this.api.pollSession(sessionId, this.pollOptions);
      if (payload.status === "done" && payload.document && payload.artifacts) {
        this.commit(submitSucceeded(this.state, {
          sessionId: payload.sessionId,
          document: payload.document,
          artifacts: payload.artifacts,
        }));
      } else {
        this.commit(submitFailed(this.state, {
          code: payload.error ?? "analysis_failed",
          detail: payload.detail ?? `session ${payload.sessionId} failed`,
          raw: JSON.stringify(payload, null, 2),
          retryable: payload.error === "backend_failure",
        }));
      }
    } catch (err) {
      this.commit(submitFailed(this.state, inlineErrorFrom(err)));
    } finally {
      this.inFlightImages.delete(image.imageId);
    }
  }

  /** Re-submit after a transient failure; only armed for retryable errors. */
  async retry(): Promise<void> {
    if (this.state.error?.retryable) await this.submit();
  }
}
