/** Canvas <-> image coordinate mapping.
 *
 * The canvas shows the image at an arbitrary zoom and pan, but every
 * coordinate that leaves the UI is expressed in native image pixels.
 * Box drags therefore convert through this module before they touch
 * the state, and the conversion must round-trip exactly for integer
 * pixel coordinates at any zoom level.
 */

import type { Box } from "./types";
import { clampBox } from "./state";

export interface Viewport {
  zoom: number;
  panX: number;
  panY: number;
}

export interface Point {
  x: number;
  y: number;
}

// Absorbs float noise from projecting through zoom and back before
// floor/ceil snap to pixel edges.
const EDGE_EPS = 1e-6;

export function createViewport(): Viewport {
  return { zoom: 1, panX: 0, panY: 0 };
}

export function imageToCanvas(vp: Viewport, p: Point): Point {
  return { x: p.x * vp.zoom + vp.panX, y: p.y * vp.zoom + vp.panY };
}

export function canvasToImage(vp: Viewport, p: Point): Point {
  return { x: (p.x - vp.panX) / vp.zoom, y: (p.y - vp.panY) / vp.zoom };
}

/** Native pixel under a canvas position. */
export function imagePixelAt(vp: Viewport, p: Point): Point {
  const img = canvasToImage(vp, p);
  return { x: Math.floor(img.x + EDGE_EPS), y: Math.floor(img.y + EDGE_EPS) };
}

/** Zoom by `factor` keeping the canvas point `anchor` fixed. */
export function zoomAt(vp: Viewport, factor: number, anchor: Point): Viewport {
  const zoom = Math.max(0.05, Math.min(64, vp.zoom * factor));
  const scale = zoom / vp.zoom;
  return {
    zoom,
    panX: anchor.x - (anchor.x - vp.panX) * scale,
    panY: anchor.y - (anchor.y - vp.panY) * scale,
  };
}

export function pan(vp: Viewport, dx: number, dy: number): Viewport {
  return { ...vp, panX: vp.panX + dx, panY: vp.panY + dy };
}

/** Convert a canvas drag to a native-resolution box covering the
 * touched pixels, clamped to the image; null when the drag is empty. */
export function boxFromDrag(vp: Viewport, a: Point, b: Point,
                            imageWidth: number, imageHeight: number): Box | null {
  const pa = canvasToImage(vp, a);
  const pb = canvasToImage(vp, b);
  const box = {
    x0: Math.floor(Math.min(pa.x, pb.x) + EDGE_EPS),
    y0: Math.floor(Math.min(pa.y, pb.y) + EDGE_EPS),
    x1: Math.ceil(Math.max(pa.x, pb.x) - EDGE_EPS),
    y1: Math.ceil(Math.max(pa.y, pb.y) - EDGE_EPS),
  };
  return clampBox(box, imageWidth, imageHeight);
}
