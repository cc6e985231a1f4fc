/** View state and its pure transitions.
 *
 * Analysis results are immutable once attached: editing boxes or knobs
 * never rewrites a stored document, it only arms the next submission,
 * which comes back under a fresh session id.
 */

import type { AnalysisDocument, Box } from "./types";

export type OverlayLayer = "mask" | "points" | "skeleton" | "diameters" | "anomalies";

export const OVERLAY_LAYERS: readonly OverlayLayer[] = [
  "mask", "points", "skeleton", "diameters", "anomalies",
];

export interface ImageMeta {
  imageId: string;
  width: number;
  height: number;
}

export interface InlineError {
  code: string;
  detail: string;
  /** Raw response body for the expandable error panel. */
  raw: string;
  retryable: boolean;
}

export interface AnalysisResultView {
  sessionId: string;
  document: AnalysisDocument;
  /** artifact path -> base64 PNG */
  artifacts: Record<string, string>;
}

export interface SliderConfig {
  minChangeThreshold: number;
  probabilityThreshold: number;
}

export interface ViewState {
  image: ImageMeta | null;
  boxes: Box[];
  overlays: Record<OverlayLayer, boolean>;
  config: SliderConfig;
  activeSessionId: string | null;
  inFlight: boolean;
  result: AnalysisResultView | null;
  error: InlineError | null;
}

export function createViewState(): ViewState {
  return {
    image: null,
    boxes: [],
    overlays: { mask: true, points: true, skeleton: true, diameters: true, anomalies: true },
    config: { minChangeThreshold: 0.5, probabilityThreshold: 0.6 },
    activeSessionId: null,
    inFlight: false,
    result: null,
    error: null,
  };
}

/** A new image starts a clean working set. */
export function setImage(state: ViewState, image: ImageMeta): ViewState {
  return {
    ...state,
    image,
    boxes: [],
    activeSessionId: null,
    inFlight: false,
    result: null,
    error: null,
  };
}

export function normalizeBox(box: Box): Box {
  return {
    x0: Math.min(box.x0, box.x1),
    y0: Math.min(box.y0, box.y1),
    x1: Math.max(box.x0, box.x1),
    y1: Math.max(box.y0, box.y1),
  };
}

export function clampBox(box: Box, width: number, height: number): Box | null {
  const b = normalizeBox(box);
  const clamped = {
    x0: Math.max(0, Math.min(b.x0, width)),
    y0: Math.max(0, Math.min(b.y0, height)),
    x1: Math.max(0, Math.min(b.x1, width)),
    y1: Math.max(0, Math.min(b.y1, height)),
  };
  if (clamped.x0 >= clamped.x1 || clamped.y0 >= clamped.y1) return null;
  return clamped;
}

export function addBox(state: ViewState, box: Box): ViewState {
  if (!state.image) return state;
  const clamped = clampBox(box, state.image.width, state.image.height);
  if (!clamped) return state;
  return { ...state, boxes: [...state.boxes, clamped] };
}

export function updateBox(state: ViewState, index: number, box: Box): ViewState {
  if (!state.image || index < 0 || index >= state.boxes.length) return state;
  const clamped = clampBox(box, state.image.width, state.image.height);
  if (!clamped) return state;
  const boxes = state.boxes.slice();
  boxes[index] = clamped;
  return { ...state, boxes };
}

export function removeBox(state: ViewState, index: number): ViewState {
  if (index < 0 || index >= state.boxes.length) return state;
  const boxes = state.boxes.slice();
  boxes.splice(index, 1);
  return { ...state, boxes };
}

export function canSubmit(state: ViewState): boolean {
  return state.image !== null && state.boxes.length > 0 && !state.inFlight;
}

export function beginSubmit(state: ViewState): ViewState {
  return { ...state, inFlight: true, error: null };
}

/** Failures never disturb the drawn boxes; they only surface the error. */
export function submitFailed(state: ViewState, error: InlineError): ViewState {
  return { ...state, inFlight: false, error };
}

function deepFreeze<T>(value: T): T {
  if (value && typeof value === "object" && !Object.isFrozen(value)) {
    Object.freeze(value);
    for (const key of Object.getOwnPropertyNames(value)) {
      deepFreeze((value as Record<string, unknown>)[key]);
    }
  }
  return value;
}

export function submitSucceeded(state: ViewState, result: AnalysisResultView): ViewState {
  return {
    ...state,
    inFlight: false,
    error: null,
    activeSessionId: result.sessionId,
    result: deepFreeze(result),
  };
}

export function setOverlay(state: ViewState, layer: OverlayLayer, on: boolean): ViewState {
  return { ...state, overlays: { ...state.overlays, [layer]: on } };
}

export function setSlider(state: ViewState, key: keyof SliderConfig, value: number): ViewState {
  const clamped = key === "probabilityThreshold"
    ? Math.max(0, Math.min(1, value))
    : Math.max(0, value);
  return { ...state, config: { ...state.config, [key]: clamped } };
}
