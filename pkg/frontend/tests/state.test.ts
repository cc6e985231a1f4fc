import { describe, expect, it } from "vitest";

import {
  addBox,
  beginSubmit,
  canSubmit,
  clampBox,
  createViewState,
  normalizeBox,
  removeBox,
  setImage,
  setOverlay,
  setSlider,
  submitFailed,
  submitSucceeded,
  updateBox,
} from "../src/state";
import type { AnalysisResultView, ViewState } from "../src/state";
import type { AnalysisDocument } from "../src/types";

const IMAGE = { imageId: "abc123", width: 448, height: 386 };
const BOX = { x0: 10, y0: 10, x1: 100, y1: 80 };

function loadedState(): ViewState {
  return addBox(setImage(createViewState(), IMAGE), BOX);
}

function emptyDocument(): AnalysisDocument {
  return {
    image: "abc123",
    per_box: [{ box: BOX, points: [], mask_path: "masks/box_0.png" }],
    skeleton: { nodes: [], segments: [] },
    thickness_profiles: [],
    findings: [],
  };
}

function result(sessionId: string): AnalysisResultView {
  return { sessionId, document: emptyDocument(), artifacts: { "mask.png": "AAAA" } };
}

describe("submission preconditions", () => {
  it("needs an image and at least one box", () => {
    const empty = createViewState();
    expect(canSubmit(empty)).toBe(false);
    expect(canSubmit(setImage(empty, IMAGE))).toBe(false);
    expect(canSubmit(loadedState())).toBe(true);
  });

  it("is disabled again when the last box is removed", () => {
    const state = removeBox(loadedState(), 0);
    expect(state.boxes).toHaveLength(0);
    expect(canSubmit(state)).toBe(false);
  });

  it("is disabled while an analysis is in flight", () => {
    expect(canSubmit(beginSubmit(loadedState()))).toBe(false);
  });
});

describe("box editing", () => {
  it("normalizes reversed corners", () => {
    expect(normalizeBox({ x0: 100, y0: 80, x1: 10, y1: 10 })).toEqual(BOX);
  });

  it("clamps to the image and rejects empty results", () => {
    expect(clampBox({ x0: -5, y0: -5, x1: 500, y1: 400 }, 448, 386))
      .toEqual({ x0: 0, y0: 0, x1: 448, y1: 386 });
    expect(clampBox({ x0: 460, y0: 10, x1: 480, y1: 30 }, 448, 386)).toBeNull();
    expect(clampBox({ x0: 10, y0: 10, x1: 10, y1: 30 }, 448, 386)).toBeNull();
  });

  it("ignores boxes drawn before an image is loaded", () => {
    const state = addBox(createViewState(), BOX);
    expect(state.boxes).toHaveLength(0);
  });

  it("updates in place and leaves other boxes alone", () => {
    const twice = addBox(loadedState(), { x0: 200, y0: 200, x1: 250, y1: 260 });
    const edited = updateBox(twice, 1, { x0: 210, y0: 210, x1: 240, y1: 250 });
    expect(edited.boxes[0]).toEqual(BOX);
    expect(edited.boxes[1]).toEqual({ x0: 210, y0: 210, x1: 240, y1: 250 });
  });

  it("never mutates the previous state object", () => {
    const before = loadedState();
    const snapshot = JSON.parse(JSON.stringify(before));
    addBox(before, { x0: 1, y0: 1, x1: 5, y1: 5 });
    removeBox(before, 0);
    setOverlay(before, "mask", false);
    expect(JSON.parse(JSON.stringify(before))).toEqual(snapshot);
  });
});

describe("results", () => {
  it("stores the session and freezes the document", () => {
    const state = submitSucceeded(beginSubmit(loadedState()), result("s1"));
    expect(state.activeSessionId).toBe("s1");
    expect(state.inFlight).toBe(false);
    const doc = state.result!.document;
    expect(() => {
      (doc.findings as unknown[]).push({});
    }).toThrow();
    expect(() => {
      (doc as { image: string }).image = "tampered";
    }).toThrow();
  });

  it("keeps the previous result visible while boxes are edited", () => {
    const withResult = submitSucceeded(beginSubmit(loadedState()), result("s1"));
    const edited = updateBox(withResult, 0, { x0: 20, y0: 20, x1: 90, y1: 70 });
    expect(edited.result?.sessionId).toBe("s1");
    expect(edited.result?.document).toBe(withResult.result?.document);
  });

  it("replaces the result only under a new session id", () => {
    const first = submitSucceeded(beginSubmit(loadedState()), result("s1"));
    const second = submitSucceeded(beginSubmit(first), result("s2"));
    expect(second.activeSessionId).toBe("s2");
    expect(second.result?.sessionId).toBe("s2");
  });

  it("drops everything when a new image arrives", () => {
    const withResult = submitSucceeded(beginSubmit(loadedState()), result("s1"));
    const fresh = setImage(withResult, { imageId: "next", width: 10, height: 10 });
    expect(fresh.boxes).toHaveLength(0);
    expect(fresh.result).toBeNull();
    expect(fresh.activeSessionId).toBeNull();
  });
});

describe("failure handling", () => {
  it("keeps the drawn boxes and surfaces the error", () => {
    const submitted = beginSubmit(loadedState());
    const failed = submitFailed(submitted, {
      code: "backend_failure", detail: "model sidecar unreachable",
      raw: "{\"error\": \"backend_failure\"}", retryable: true,
    });
    expect(failed.boxes).toEqual([BOX]);
    expect(failed.inFlight).toBe(false);
    expect(failed.error?.retryable).toBe(true);
    expect(failed.error?.raw).toContain("backend_failure");
  });

  it("clears the error when a submission starts", () => {
    const failed = submitFailed(loadedState(), {
      code: "invalid_box", detail: "", raw: "", retryable: false,
    });
    expect(beginSubmit(failed).error).toBeNull();
  });
});

describe("overlay toggles", () => {
  it("flips one layer and leaves the rest", () => {
    const state = setOverlay(loadedState(), "skeleton", false);
    expect(state.overlays.skeleton).toBe(false);
    expect(state.overlays.mask).toBe(true);
    expect(state.overlays.points).toBe(true);
    expect(state.overlays.diameters).toBe(true);
    expect(state.overlays.anomalies).toBe(true);
  });
});

describe("config sliders", () => {
  it("exposes exactly the two supported knobs", () => {
    expect(Object.keys(createViewState().config).sort())
      .toEqual(["minChangeThreshold", "probabilityThreshold"]);
  });

  it("clamps the probability threshold into [0, 1]", () => {
    const state = setSlider(loadedState(), "probabilityThreshold", 1.7);
    expect(state.config.probabilityThreshold).toBe(1);
    expect(setSlider(state, "probabilityThreshold", -2).config.probabilityThreshold).toBe(0);
  });

  it("keeps the change threshold non-negative", () => {
    expect(setSlider(loadedState(), "minChangeThreshold", -0.3).config.minChangeThreshold).toBe(0);
    expect(setSlider(loadedState(), "minChangeThreshold", 1.2).config.minChangeThreshold).toBe(1.2);
  });
});
