"""Segmentation backends and the iterative point-refinement orchestrator.

Backends implement one call: mask = segment(request). Three are provided:
a precomputed-mask provider (tests, evaluation upper bound), a threshold
segmenter (deterministic fallback, also the substrate for the naive
baseline), and an HTTP client for a remote model service. The
orchestrator clamps every backend mask to the request box.
"""

from __future__ import annotations

import base64
import uuid
from dataclasses import dataclass
from typing import Mapping, Protocol

import numpy as np

from .errors import BackendFailure, NoCandidatesError
from .points import PromptPoint, build_candidates, pick_point
from .raster import (
    BinaryMask,
    BoundingBox,
    GrayscaleImage,
    PipelineConfig,
    to_probability_map,
)

STRATEGIES = ("box-only", "naive", "dr-sam")


@dataclass(frozen=True)
class SegmentationRequest:
    image: GrayscaleImage
    box: BoundingBox
    points: tuple[PromptPoint, ...] = ()
    image_id: str | None = None

    def __post_init__(self):
        self.box.validate_for(self.image.width, self.image.height)
        seen = set()
        for p in self.points:
            if not self.box.contains(p.x, p.y):
                raise ValueError(f"point ({p.x},{p.y}) outside box")
            if (p.x, p.y) in seen:
                raise ValueError(f"duplicate point ({p.x},{p.y})")
            seen.add((p.x, p.y))


class SegmentationBackend(Protocol):
    name: str
    uses_points: bool

    def segment(self, request: SegmentationRequest) -> BinaryMask: ...


def clamp_to_box(mask: BinaryMask, box: BoundingBox) -> BinaryMask:
    arr = np.zeros((mask.height, mask.width), dtype=bool)
    arr[box.y0:box.y1, box.x0:box.x1] = mask.pixels[box.y0:box.y1, box.x0:box.x1]
    return BinaryMask(arr)


class PrecomputedBackend:
    """Returns stored masks keyed by image id, ignoring points."""

    name = "precomputed"
    uses_points = False

    def __init__(self, masks: Mapping[str, BinaryMask]):
        self._masks = dict(masks)

    def segment(self, request: SegmentationRequest) -> BinaryMask:
        key = request.image_id
        if key is None or key not in self._masks:
            raise BackendFailure(f"no precomputed mask for image id {key!r}")
        mask = self._masks[key]
        if (mask.height, mask.width) != (request.image.height, request.image.width):
            raise BackendFailure(
                f"precomputed mask for {key!r} has wrong dimensions"
            )
        return mask


def fallback_threshold_segment(
    img: GrayscaleImage,
    box: BoundingBox,
    threshold: float,
    points: tuple[PromptPoint, ...] = (),
) -> BinaryMask:
    """Probability-thresholded in-box pixels, narrowed by components.

    With prompt points: keep the connected components containing at least
    one point. Without: keep the largest component (ties to the earliest
    label, i.e. row-major first encounter).
    """
    from . import _kernels

    box.validate_for(img.width, img.height)
    pm = to_probability_map(img)
    arr = np.zeros((img.height, img.width), dtype=bool)
    arr[box.y0:box.y1, box.x0:box.x1] = (
        pm.values[box.y0:box.y1, box.x0:box.x1] >= threshold
    )
    if not arr.any():
        return BinaryMask(arr)
    labels, count = _kernels.label(arr.astype(np.uint8), 8)
    if points:
        wanted = {int(labels[p.y, p.x]) for p in points} - {0}
        if not wanted:
            return BinaryMask(np.zeros_like(arr))
        keep = np.isin(labels, sorted(wanted))
    else:
        sizes = np.bincount(labels.ravel(), minlength=count + 1)
        keep = labels == int(np.argmax(sizes[1:])) + 1
    return BinaryMask(arr & keep)


class ThresholdBackend:
    """Deterministic fallback segmenter driven by the probability map."""

    name = "threshold"
    uses_points = True

    def __init__(self, threshold: float = 0.6):
        self.threshold = threshold

    def segment(self, request: SegmentationRequest) -> BinaryMask:
        return fallback_threshold_segment(
            request.image, request.box, self.threshold, request.points
        )


class RemoteBackend:
    """HTTP client for a model service speaking the segmentation protocol."""

    name = "remote"
    uses_points = True

    def __init__(self, url: str, timeout: float = 30.0):
        self.url = url.rstrip("/")
        self.timeout = timeout

    def segment(self, request: SegmentationRequest) -> BinaryMask:
        import httpx

        request_id = uuid.uuid4().hex[:12]
        body = {
            "image_b64": base64.b64encode(request.image.png_bytes()).decode("ascii"),
            "box": request.box.as_dict(),
            "points": [p.to_dict() for p in request.points],
        }
        try:
            resp = httpx.post(
                f"{self.url}/segment",
                json=body,
                timeout=self.timeout,
                headers={"X-Request-Id": request_id},
            )
        except httpx.HTTPError as exc:
            raise BackendFailure(f"backend unreachable: {exc}", request_id) from exc
        if resp.status_code != 200:
            raise BackendFailure(
                f"backend returned {resp.status_code}: {resp.text[:200]}",
                request_id,
            )
        try:
            mask = BinaryMask.from_bytes(base64.b64decode(resp.json()["mask_b64"]))
        except Exception as exc:
            raise BackendFailure(f"malformed backend response: {exc}", request_id) from exc
        if (mask.height, mask.width) != (request.image.height, request.image.width):
            raise BackendFailure(
                f"backend mask is {mask.width}x{mask.height}, expected "
                f"{request.image.width}x{request.image.height}",
                request_id,
            )
        return mask


@dataclass(frozen=True)
class RefinementResult:
    mask: BinaryMask
    points: tuple[PromptPoint, ...]
    per_iteration_masks: tuple[BinaryMask, ...]
    truncated: bool = False  # candidate pool ran dry before 2 + iterations points


def run_point_refinement(
    backend: SegmentationBackend,
    img: GrayscaleImage,
    box: BoundingBox,
    cfg: PipelineConfig,
    image_id: str | None = None,
) -> RefinementResult:
    """Iteratively grow the positive point set and re-segment.

    Point 1: densest candidate in the box (selectionRadius). Point 2: the
    same selection over candidates beyond excludeRadius of point 1, with
    secondPointSelectionRadius density. Each refinement iteration segments
    with all points so far, then picks the next point off that mask.
    The final mask uses every point. Candidate exhaustion at any step ends
    the loop early with truncated=True.
    """
    pm = to_probability_map(img)
    rng = np.random.default_rng(cfg.rng_seed)
    threshold = cfg.probability_threshold

    first = pick_point(
        build_candidates(pm, box, threshold),
        cfg.selection_radius, cfg.sample_size, rng,
    )
    points = [PromptPoint(*first)]
    truncated = False
    try:
        second = pick_point(
            build_candidates(
                pm, box, threshold,
                excluded_disks=((first, cfg.exclude_radius),),
            ),
            cfg.second_point_selection_radius, cfg.sample_size, rng,
        )
        points.append(PromptPoint(*second))
    except NoCandidatesError:
        truncated = True

    per_iteration = []
    if not truncated:
        for _ in range(cfg.refinement_iterations):
            mask = clamp_to_box(
                backend.segment(
                    SegmentationRequest(img, box, tuple(points), image_id)
                ),
                box,
            )
            per_iteration.append(mask)
            occupied = mask.pixels.copy()
            for p in points:  # keep accumulated points pairwise distinct
                occupied[p.y, p.x] = True
            try:
                nxt = pick_point(
                    build_candidates(
                        pm, box, threshold, excluded=BinaryMask(occupied)
                    ),
                    cfg.selection_radius, cfg.sample_size, rng,
                )
            except NoCandidatesError:
                truncated = True
                break
            points.append(PromptPoint(*nxt))

    final = clamp_to_box(
        backend.segment(SegmentationRequest(img, box, tuple(points), image_id)),
        box,
    )
    return RefinementResult(final, tuple(points), tuple(per_iteration), truncated)


def naive_point(img: GrayscaleImage, box: BoundingBox) -> PromptPoint:
    """The single in-box pixel of minimum value, ties in (y, x) order."""
    window = img.pixels[box.y0:box.y1, box.x0:box.x1]
    flat = int(np.argmin(window))  # row-major argmin = (y, x) tie order
    dy, dx = divmod(flat, window.shape[1])
    return PromptPoint(box.x0 + dx, box.y0 + dy)


def segment_with_strategy(
    backend: SegmentationBackend,
    img: GrayscaleImage,
    box: BoundingBox,
    cfg: PipelineConfig,
    strategy: str,
    image_id: str | None = None,
) -> tuple[BinaryMask, tuple[PromptPoint, ...]]:
    """Run one of the benchmark strategies for a single box."""
    if strategy == "box-only":
        mask = clamp_to_box(
            backend.segment(SegmentationRequest(img, box, (), image_id)), box
        )
        return mask, ()
    if strategy == "naive":
        pt = naive_point(img, box)
        mask = clamp_to_box(
            backend.segment(SegmentationRequest(img, box, (pt,), image_id)), box
        )
        return mask, (pt,)
    if strategy == "dr-sam":
        result = run_point_refinement(backend, img, box, cfg, image_id)
        return result.mask, result.points
    raise ValueError(f"unknown strategy {strategy!r}, expected one of {STRATEGIES}")
