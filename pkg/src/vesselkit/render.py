"""Server-side overlay rendering: mask tint, centerline, markers."""

from __future__ import annotations

import io

import numpy as np
from PIL import Image, ImageDraw

from .anomaly import AnomalyFinding
from .points import PromptPoint
from .raster import BinaryMask, GrayscaleImage
from .skeleton import SkeletonGraph

MASK_TINT = (220, 40, 40)
CENTERLINE = (40, 220, 90)
POINT_COLOR = (60, 120, 255)
KIND_COLORS = {"stenosis": (255, 60, 60), "aneurysm": (255, 160, 30)}


def render_overlay(
    img: GrayscaleImage,
    mask: BinaryMask,
    graph: SkeletonGraph,
    findings: list[AnomalyFinding],
    points: list[PromptPoint],
) -> bytes:
    """Compose the analysis layers over the source image; returns PNG bytes."""
    rgb = np.stack([img.pixels] * 3, axis=2).astype(np.float64)
    tint = np.array(MASK_TINT, dtype=np.float64)
    rgb[mask.pixels] = 0.55 * rgb[mask.pixels] + 0.45 * tint
    for seg in graph.segments:
        for x, y in seg.points:
            rgb[y, x] = CENTERLINE
    for node in graph.nodes:
        rgb[node.y, node.x] = CENTERLINE

    im = Image.fromarray(np.clip(np.rint(rgb), 0, 255).astype(np.uint8), "RGB")
    draw = ImageDraw.Draw(im)
    for p in points:
        draw.line([(p.x - 3, p.y), (p.x + 3, p.y)], fill=POINT_COLOR, width=1)
        draw.line([(p.x, p.y - 3), (p.x, p.y + 3)], fill=POINT_COLOR, width=1)
    for f in findings:
        r = max(3.0, f.reference_radius)
        color = KIND_COLORS[f.kind]
        draw.ellipse(
            [f.x - r, f.y - r, f.x + r, f.y + r], outline=color, width=2
        )
    buf = io.BytesIO()
    im.save(buf, format="PNG")
    return buf.getvalue()
