/** Browser entry point: DOM wiring around the pure modules. */

import { ApiClient } from "./api";
import { ReviewApp } from "./app";
import { renderScene } from "./render";
import type { Scene } from "./render";
import {
  OVERLAY_LAYERS,
  addBox,
  canSubmit,
  removeBox,
  setOverlay,
  setSlider,
} from "./state";
import type { OverlayLayer, SliderConfig, ViewState } from "./state";
import { boxFromDrag, createViewport, pan, zoomAt } from "./viewport";
import type { Point, Viewport } from "./viewport";

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el as T;
}

const canvas = byId<HTMLCanvasElement>("view");
const ctx = canvas.getContext("2d");
if (!ctx) throw new Error("2d canvas is unavailable");

const api = new ApiClient("");
const app = new ReviewApp(api, onStateChange);

let viewport: Viewport = createViewport();
let baseImage: ImageBitmap | null = null;
let maskImage: ImageBitmap | null = null;
let maskSession: string | null = null;
let drag: { start: Point; current: Point; button: number } | null = null;

function canvasPoint(ev: MouseEvent): Point {
  const rect = canvas.getBoundingClientRect();
  return { x: ev.clientX - rect.left, y: ev.clientY - rect.top };
}

async function decodeBase64Png(b64: string): Promise<ImageBitmap> {
  const bytes = Uint8Array.from(atob(b64), (c) => c.charCodeAt(0));
  return createImageBitmap(new Blob([bytes], { type: "image/png" }));
}

/** Tint the binary mask red so it reads as an overlay, not an image. */
async function tintMask(b64: string): Promise<ImageBitmap> {
  const raw = await decodeBase64Png(b64);
  const off = document.createElement("canvas");
  off.width = raw.width;
  off.height = raw.height;
  const octx = off.getContext("2d");
  if (!octx) throw new Error("2d canvas is unavailable");
  octx.drawImage(raw, 0, 0);
  const data = octx.getImageData(0, 0, off.width, off.height);
  const px = data.data;
  for (let i = 0; i < px.length; i += 4) {
    const on = (px[i] ?? 0) >= 128;
    px[i] = 214;
    px[i + 1] = 39;
    px[i + 2] = 40;
    px[i + 3] = on ? 255 : 0;
  }
  octx.putImageData(data, 0, 0);
  return createImageBitmap(off);
}

function currentScene(state: ViewState): Scene {
  return {
    viewport,
    imageWidth: state.image?.width ?? 0,
    imageHeight: state.image?.height ?? 0,
    canvasWidth: canvas.width,
    canvasHeight: canvas.height,
    overlays: state.overlays,
    boxes: state.boxes,
  };
}

function paint(): void {
  const state = app.state;
  renderScene(ctx!, currentScene(state), {
    baseImage,
    maskImage: state.result && state.result.sessionId === maskSession ? maskImage : null,
    document: state.result?.document ?? null,
  });
  if (drag && state.image) {
    const ghost = boxFromDrag(viewport, drag.start, drag.current,
                              state.image.width, state.image.height);
    if (ghost) {
      ctx!.strokeStyle = "#ffd24a";
      ctx!.lineWidth = 1;
      const a = { x: ghost.x0 * viewport.zoom + viewport.panX,
                  y: ghost.y0 * viewport.zoom + viewport.panY };
      ctx!.strokeRect(a.x, a.y, (ghost.x1 - ghost.x0) * viewport.zoom,
                      (ghost.y1 - ghost.y0) * viewport.zoom);
    }
  }
}

function renderBoxList(state: ViewState): void {
  const list = byId<HTMLUListElement>("box-list");
  list.replaceChildren();
  state.boxes.forEach((box, i) => {
    const item = document.createElement("li");
    item.textContent = `(${box.x0}, ${box.y0}) .. (${box.x1}, ${box.y1}) `;
    const del = document.createElement("button");
    del.textContent = "remove";
    del.addEventListener("click", () => {
      app.state = removeBox(app.state, i);
      onStateChange(app.state);
    });
    item.appendChild(del);
    list.appendChild(item);
  });
}

function renderError(state: ViewState): void {
  const panel = byId<HTMLDivElement>("error-panel");
  const retry = byId<HTMLButtonElement>("retry");
  if (!state.error) {
    panel.hidden = true;
    retry.hidden = true;
    return;
  }
  panel.hidden = false;
  byId<HTMLSpanElement>("error-code").textContent = state.error.code;
  byId<HTMLSpanElement>("error-detail").textContent = state.error.detail;
  byId<HTMLPreElement>("error-raw").textContent = state.error.raw || "(empty body)";
  retry.hidden = !state.error.retryable;
}

function renderFindingsSummary(state: ViewState): void {
  const out = byId<HTMLDivElement>("findings");
  const doc = state.result?.document;
  if (!doc) {
    out.textContent = state.inFlight ? "analyzing..." : "";
    return;
  }
  const lines = doc.findings.map((f) => {
    const pct = Math.round(f.change_p * 100);
    return `${f.kind} at (${f.x}, ${f.y}) segment ${f.segment}: ` +
      `${pct > 0 ? "+" : ""}${pct}% vs reference radius ${f.reference_radius_px.toFixed(1)}px`;
  });
  out.textContent = lines.length > 0
    ? lines.join("\n")
    : "no anomalies flagged";
}

async function onStateChange(state: ViewState): Promise<void> {
  byId<HTMLButtonElement>("submit").disabled = !canSubmit(state);
  renderBoxList(state);
  renderError(state);
  renderFindingsSummary(state);
  if (state.result && state.result.sessionId !== maskSession) {
    const b64 = state.result.artifacts["mask.png"];
    if (b64) {
      maskImage = await tintMask(b64);
      maskSession = state.result.sessionId;
    }
  }
  paint();
}

byId<HTMLInputElement>("file").addEventListener("change", async (ev) => {
  const input = ev.target as HTMLInputElement;
  const file = input.files?.[0];
  if (!file) return;
  const bytes = new Uint8Array(await file.arrayBuffer());
  baseImage = await createImageBitmap(new Blob([bytes]));
  maskImage = null;
  maskSession = null;
  viewport = createViewport();
  await app.loadImage(bytes);
});

byId<HTMLButtonElement>("submit").addEventListener("click", () => void app.submit());
byId<HTMLButtonElement>("retry").addEventListener("click", () => void app.retry());

for (const layer of OVERLAY_LAYERS) {
  const toggle = byId<HTMLInputElement>(`toggle-${layer}`);
  toggle.checked = app.state.overlays[layer as OverlayLayer];
  toggle.addEventListener("change", () => {
    app.state = setOverlay(app.state, layer as OverlayLayer, toggle.checked);
    paint();
  });
}

function bindSlider(id: string, key: keyof SliderConfig): void {
  const slider = byId<HTMLInputElement>(id);
  const label = byId<HTMLSpanElement>(`${id}-value`);
  slider.value = String(app.state.config[key]);
  label.textContent = slider.value;
  slider.addEventListener("input", () => {
    app.state = setSlider(app.state, key, Number(slider.value));
    label.textContent = String(app.state.config[key]);
  });
}

bindSlider("min-change", "minChangeThreshold");
bindSlider("prob-threshold", "probabilityThreshold");

canvas.addEventListener("mousedown", (ev) => {
  drag = { start: canvasPoint(ev), current: canvasPoint(ev), button: ev.button };
});

canvas.addEventListener("mousemove", (ev) => {
  if (!drag) return;
  const p = canvasPoint(ev);
  if (drag.button === 1 || ev.shiftKey) {
    viewport = pan(viewport, p.x - drag.current.x, p.y - drag.current.y);
    drag.current = p;
  } else {
    drag.current = p;
  }
  paint();
});

canvas.addEventListener("mouseup", (ev) => {
  if (!drag) return;
  const state = app.state;
  const wasPan = drag.button === 1 || ev.shiftKey;
  if (!wasPan && state.image) {
    const box = boxFromDrag(viewport, drag.start, canvasPoint(ev),
                            state.image.width, state.image.height);
    if (box) {
      app.state = addBox(state, box);
      onStateChange(app.state);
    }
  }
  drag = null;
  paint();
});

canvas.addEventListener("wheel", (ev) => {
  ev.preventDefault();
  viewport = zoomAt(viewport, ev.deltaY < 0 ? 1.2 : 1 / 1.2, canvasPoint(ev));
  paint();
});

paint();
