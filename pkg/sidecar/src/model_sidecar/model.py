"""Model handles for the sidecar.

A handle owns one loaded model and answers segment requests for it.
Handles report their load status; the service refuses traffic until the
handle is ready.  The default model is a self-contained promptable
thresholder so the sidecar runs without any downloaded weights.
"""

from __future__ import annotations

import logging
import os
from collections import deque
from dataclasses import dataclass, field

import numpy as np

log = logging.getLogger(__name__)

WEIGHTS_ENV = "MODEL_SIDECAR_WEIGHTS"

# Darker pixels are more vessel-like; keep everything at or above this
# probability inside the prompt box.
_DEFAULT_THRESHOLD = 0.6

_OFFSETS = (
    (-1, -1), (-1, 0), (-1, 1),
    (0, -1), (0, 1),
    (1, -1), (1, 0), (1, 1),
)


class InferenceError(RuntimeError):
    """The model accepted the request but failed to produce a mask."""


def _components(mask: np.ndarray) -> np.ndarray:
    """Label 8-connected foreground components; 0 is background."""
    labels = np.zeros(mask.shape, dtype=np.int32)
    h, w = mask.shape
    nxt = 0
    for sy in range(h):
        for sx in range(w):
            if not mask[sy, sx] or labels[sy, sx]:
                continue
            nxt += 1
            labels[sy, sx] = nxt
            queue = deque([(sy, sx)])
            while queue:
                y, x = queue.popleft()
                for dy, dx in _OFFSETS:
                    ny, nx = y + dy, x + dx
                    if 0 <= ny < h and 0 <= nx < w and mask[ny, nx] and not labels[ny, nx]:
                        labels[ny, nx] = nxt
                        queue.append((ny, nx))
    return labels


@dataclass
class ModelHandle:
    """One loaded model plus the metadata the service reports."""

    model_id: str
    device: str = "cpu"
    loaded: bool = field(default=False)

    def load(self) -> None:
        self.loaded = True

    def segment(self, pixels: np.ndarray, box: tuple[int, int, int, int],
                points: list[dict]) -> np.ndarray:
        raise NotImplementedError


class ThresholdModel(ModelHandle):
    """Promptable thresholder: dark pixels in the box, component-filtered.

    Candidate masks are the connected components of the thresholded box
    region.  Positive prompt points vote for their components; with no
    positive hit the largest component wins (the highest-scoring
    candidate by pixel count).  Everything outside the box is background.
    """

    def __init__(self, threshold: float = _DEFAULT_THRESHOLD) -> None:
        super().__init__(model_id=f"threshold-{threshold:g}")
        self.threshold = threshold

    def segment(self, pixels: np.ndarray, box: tuple[int, int, int, int],
                points: list[dict]) -> np.ndarray:
        x0, y0, x1, y1 = box
        prob = 1.0 - pixels.astype(np.float64) / 255.0
        fg = prob >= self.threshold
        boxed = np.zeros_like(fg)
        boxed[y0:y1, x0:x1] = fg[y0:y1, x0:x1]
        if not boxed.any():
            return boxed

        labels = _components(boxed)
        hits = {labels[p["y"], p["x"]] for p in points if p["label"] == 1}
        hits.discard(0)
        if hits:
            return np.isin(labels, sorted(hits))
        counts = np.bincount(labels.ravel())
        counts[0] = 0
        return labels == int(counts.argmax())


class CheckpointModel(ModelHandle):
    """Handle for a promptable transformer checkpoint on disk.

    Loading is deferred to ``load``.  The sidecar starts, reports the
    handle as not ready, and serves 503 until the weights are in memory.
    """

    def __init__(self, weights_path: str, device: str = "cpu") -> None:
        super().__init__(model_id=f"checkpoint:{os.path.basename(weights_path)}", device=device)
        self.weights_path = weights_path
        self._processor = None
        self._net = None

    def load(self) -> None:
        try:
            from transformers import SamModel, SamProcessor
        except ImportError as exc:
            raise InferenceError(f"checkpoint backend needs transformers: {exc}") from exc
        self._processor = SamProcessor.from_pretrained(self.weights_path)
        self._net = SamModel.from_pretrained(self.weights_path).to(self.device)
        self.loaded = True

    def segment(self, pixels: np.ndarray, box: tuple[int, int, int, int],
                points: list[dict]) -> np.ndarray:
        import torch

        rgb = np.stack([pixels] * 3, axis=-1)
        coords = [[[p["x"], p["y"]] for p in points]] if points else None
        labels = [[p["label"] for p in points]] if points else None
        inputs = self._processor(
            rgb, input_boxes=[[list(box)]], input_points=coords,
            input_labels=labels, return_tensors="pt",
        ).to(self.device)
        with torch.no_grad():
            out = self._net(**inputs, multimask_output=True)
        masks = self._processor.image_processor.post_process_masks(
            out.pred_masks.cpu(), inputs["original_sizes"].cpu(),
            inputs["reshaped_input_sizes"].cpu(),
        )[0][0]
        scores = out.iou_scores.cpu().numpy().ravel()
        best = masks[int(scores.argmax())].numpy().astype(bool)
        return best


def load_model(spec: str | None = None) -> ModelHandle:
    """Build the handle named by ``spec`` or the weights env var.

    ``threshold`` or ``threshold:<p>`` selects the built-in model;
    ``sam:<path>`` points at a checkpoint directory.  The handle is
    returned unloaded; callers decide when to pay the load cost.
    """
    if spec is None:
        spec = os.environ.get(WEIGHTS_ENV, "threshold")
    if spec == "threshold":
        return ThresholdModel()
    if spec.startswith("threshold:"):
        return ThresholdModel(threshold=float(spec.split(":", 1)[1]))
    if spec.startswith("sam:"):
        return CheckpointModel(weights_path=spec.split(":", 1)[1])
    raise ValueError(f"unknown model spec: {spec!r}")
