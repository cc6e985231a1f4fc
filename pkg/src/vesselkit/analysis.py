"""End-to-end single-image analysis shared by the CLI and the service.

Both front ends must emit byte-identical documents for identical inputs,
so everything here is deterministic: the image id is a content hash, box
masks get fixed relative paths, and the document serializer pins key
order and layout.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .anomaly import extract_extremums, flag_and_grade
from .metrics import distance_transform, thickness_profile
from .raster import BinaryMask, BoundingBox, GrayscaleImage, PipelineConfig, union_masks
from .render import render_overlay
from .segment import SegmentationBackend, run_point_refinement
from .skeleton import decompose, prune, skeletonize


def image_id_for(data: bytes) -> str:
    """Stable content id for an encoded raster."""
    return hashlib.sha256(data).hexdigest()[:16]


@dataclass(frozen=True)
class AnalysisResult:
    document: dict
    artifacts: dict[str, bytes]  # relative path -> encoded raster


def document_bytes(document: dict) -> bytes:
    return (json.dumps(document, indent=2, sort_keys=True) + "\n").encode("utf-8")


def analyze_image(
    img: GrayscaleImage,
    boxes: list[BoundingBox],
    backend: SegmentationBackend,
    cfg: PipelineConfig,
    image_id: str,
) -> AnalysisResult:
    """Refine points per box, unite masks, extract centerline and findings."""
    if not boxes:
        raise ValueError("at least one bounding box is required")
    for box in boxes:
        box.validate_for(img.width, img.height)

    per_box = []
    box_masks = []
    all_points = []
    artifacts: dict[str, bytes] = {}
    for i, box in enumerate(boxes):
        result = run_point_refinement(backend, img, box, cfg, image_id=image_id)
        mask_path = f"masks/box_{i}.png"
        artifacts[mask_path] = result.mask.png_bytes()
        per_box.append(
            {
                "box": box.as_dict(),
                "points": [p.to_dict() for p in result.points],
                "mask_path": mask_path,
            }
        )
        box_masks.append(result.mask)
        all_points.extend(result.points)

    united = union_masks(box_masks)
    pruned = prune(decompose(skeletonize(united)), cfg.min_branch_length)
    graph = decompose(pruned)
    field = distance_transform(united)

    profiles = []
    findings = []
    for segment in graph.segments:
        if segment.length < cfg.min_segment_length:
            continue
        profile = thickness_profile(segment, field)
        profiles.append(profile.to_dict())
        extremums = extract_extremums(profile, cfg)
        findings.extend(flag_and_grade(segment, profile, field, extremums, cfg))

    document = {
        "image": image_id,
        "per_box": per_box,
        "skeleton": graph.to_dict(),
        "thickness_profiles": profiles,
        "findings": [f.to_dict() for f in findings],
    }
    artifacts["mask.png"] = united.png_bytes()
    artifacts["overlay.png"] = render_overlay(img, united, graph, findings, all_points)
    return AnalysisResult(document, artifacts)
