/** Overlay rendering.
 *
 * Each overlay is drawn by its own function gated by its own toggle, so
 * switching one off removes exactly that layer on the next paint.  The
 * functions draw through a narrow context interface; the browser hands
 * in a real CanvasRenderingContext2D, tests hand in a recorder.
 */

import type { AnalysisDocument, Box, Finding } from "./types";
import type { OverlayLayer } from "./state";
import type { Point, Viewport } from "./viewport";
import { imageToCanvas } from "./viewport";

/** The slice of CanvasRenderingContext2D the overlays actually use.
 * Style properties keep the DOM union type so a real 2d context
 * satisfies the interface; the renderer only ever assigns strings. */
export interface DrawContext {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
  globalAlpha: number;
  imageSmoothingEnabled: boolean;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  stroke(): void;
  fill(): void;
  fillText(text: string, x: number, y: number): void;
  drawImage(image: unknown, dx: number, dy: number, dw: number, dh: number): void;
}

export const KIND_COLORS: Record<Finding["kind"], string> = {
  stenosis: "#d62728",
  aneurysm: "#ff9114",
};

const MASK_TINT_ALPHA = 0.45;
const POINT_COLORS: Record<0 | 1, string> = { 1: "#1f77d0", 0: "#888888" };

/** -0.6 -> "-60%", 0.8 -> "+80%". */
export function formatChange(changeP: number): string {
  const pct = Math.round(changeP * 100);
  return `${pct > 0 ? "+" : ""}${pct}%`;
}

export interface SceneAssets {
  /** Decoded angiogram, ready for drawImage; null before upload. */
  baseImage: unknown | null;
  /** Pre-tinted mask bitmap from the session artifacts; null without a result. */
  maskImage: unknown | null;
  document: AnalysisDocument | null;
}

export interface Scene {
  viewport: Viewport;
  imageWidth: number;
  imageHeight: number;
  canvasWidth: number;
  canvasHeight: number;
  overlays: Record<OverlayLayer, boolean>;
  boxes: Box[];
  activeBoxIndex?: number;
}

function toCanvas(vp: Viewport, x: number, y: number): Point {
  return imageToCanvas(vp, { x, y });
}

function drawBase(ctx: DrawContext, scene: Scene, image: unknown): void {
  const origin = toCanvas(scene.viewport, 0, 0);
  ctx.globalAlpha = 1;
  // Nearest-neighbor: inspecting single pixels must show crisp pixels.
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(image, origin.x, origin.y,
                scene.imageWidth * scene.viewport.zoom,
                scene.imageHeight * scene.viewport.zoom);
}

function drawMask(ctx: DrawContext, scene: Scene, image: unknown): void {
  const origin = toCanvas(scene.viewport, 0, 0);
  ctx.globalAlpha = MASK_TINT_ALPHA;
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(image, origin.x, origin.y,
                scene.imageWidth * scene.viewport.zoom,
                scene.imageHeight * scene.viewport.zoom);
  ctx.globalAlpha = 1;
}

function drawBoxes(ctx: DrawContext, scene: Scene): void {
  scene.boxes.forEach((box, i) => {
    const a = toCanvas(scene.viewport, box.x0, box.y0);
    const b = toCanvas(scene.viewport, box.x1, box.y1);
    ctx.strokeStyle = i === scene.activeBoxIndex ? "#ffd24a" : "#e6e6e6";
    ctx.lineWidth = i === scene.activeBoxIndex ? 2 : 1;
    ctx.strokeRect(a.x, a.y, b.x - a.x, b.y - a.y);
  });
}

function drawPoints(ctx: DrawContext, scene: Scene, doc: AnalysisDocument): void {
  for (const entry of doc.per_box) {
    for (const pt of entry.points) {
      const c = toCanvas(scene.viewport, pt.x + 0.5, pt.y + 0.5);
      ctx.fillStyle = POINT_COLORS[pt.label];
      ctx.beginPath();
      ctx.arc(c.x, c.y, 3, 0, Math.PI * 2);
      ctx.fill();
    }
  }
}

function drawSkeleton(ctx: DrawContext, scene: Scene, doc: AnalysisDocument): void {
  ctx.strokeStyle = "#2ca02c";
  ctx.lineWidth = Math.max(1, scene.viewport.zoom * 0.6);
  for (const segment of doc.skeleton.segments) {
    if (segment.points.length === 0) continue;
    ctx.beginPath();
    segment.points.forEach(([x, y], i) => {
      const c = toCanvas(scene.viewport, x + 0.5, y + 0.5);
      if (i === 0) ctx.moveTo(c.x, c.y);
      else ctx.lineTo(c.x, c.y);
    });
    ctx.stroke();
  }
}

function drawDiameters(ctx: DrawContext, scene: Scene, doc: AnalysisDocument): void {
  ctx.strokeStyle = "#8ab8ff";
  ctx.lineWidth = 1;
  for (const finding of doc.findings) {
    const c = toCanvas(scene.viewport, finding.x + 0.5, finding.y + 0.5);
    ctx.beginPath();
    ctx.arc(c.x, c.y, finding.reference_radius_px * scene.viewport.zoom, 0, Math.PI * 2);
    ctx.stroke();
  }
}

function drawAnomalies(ctx: DrawContext, scene: Scene, doc: AnalysisDocument): void {
  ctx.font = "12px sans-serif";
  for (const finding of doc.findings) {
    const c = toCanvas(scene.viewport, finding.x + 0.5, finding.y + 0.5);
    ctx.fillStyle = KIND_COLORS[finding.kind];
    ctx.beginPath();
    ctx.arc(c.x, c.y, 5, 0, Math.PI * 2);
    ctx.fill();
    ctx.fillText(formatChange(finding.change_p), c.x + 8, c.y - 8);
  }
}

export function renderScene(ctx: DrawContext, scene: Scene, assets: SceneAssets): void {
  ctx.globalAlpha = 1;
  ctx.clearRect(0, 0, scene.canvasWidth, scene.canvasHeight);
  ctx.fillStyle = "#14161a";
  ctx.fillRect(0, 0, scene.canvasWidth, scene.canvasHeight);

  if (assets.baseImage) drawBase(ctx, scene, assets.baseImage);
  if (scene.overlays.mask && assets.maskImage) drawMask(ctx, scene, assets.maskImage);
  const doc = assets.document;
  if (doc) {
    if (scene.overlays.skeleton) drawSkeleton(ctx, scene, doc);
    if (scene.overlays.diameters) drawDiameters(ctx, scene, doc);
    if (scene.overlays.points) drawPoints(ctx, scene, doc);
    if (scene.overlays.anomalies) drawAnomalies(ctx, scene, doc);
  }
  drawBoxes(ctx, scene);
}
