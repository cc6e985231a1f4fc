"""Dataset loading, IoU scoring, and strategy benchmarking.

On-disk dataset layout:
    images/<id>.png     8-bit grayscale angiograms
    masks/<id>.png      ground-truth vessel masks (0/255)
    boxes.json          {"<id>": [{"x0":..,"y0":..,"x1":..,"y1":..}, ...]}
    anomalies.json      {"<id>": [{"x":..,"y":..,"kind":"stenosis"|"aneurysm"}]}
                        (optional file, optional per-id entries)

Per-image score is the mean of per-box IoUs (predicted box mask against
the ground truth clipped to that box); the IoU of the united mask against
the full ground truth is reported alongside.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .anomaly import AnomalyFinding, detect
from .raster import BinaryMask, BoundingBox, GrayscaleImage, PipelineConfig, union_masks
from .segment import SegmentationBackend, clamp_to_box, segment_with_strategy


def iou(a: BinaryMask, b: BinaryMask) -> float:
    """Intersection over union; 1.0 when both masks are empty."""
    if (a.height, a.width) != (b.height, b.width):
        raise ValueError(
            f"mask dimensions differ: {a.width}x{a.height} vs {b.width}x{b.height}"
        )
    union = (a.pixels | b.pixels).sum()
    if union == 0:
        return 1.0
    return float((a.pixels & b.pixels).sum() / union)


def match_anomalies(
    predicted: list[AnomalyFinding],
    labeled: list[dict],
    tol_radius: float,
) -> dict:
    """Greedy nearest-first one-to-one matching of same-kind findings."""
    if tol_radius <= 0:
        raise ValueError("tol_radius must be positive")
    pairs = []
    for i, p in enumerate(predicted):
        for j, lab in enumerate(labeled):
            if p.kind != lab["kind"]:
                continue
            dist = float(np.hypot(p.x - lab["x"], p.y - lab["y"]))
            if dist <= tol_radius:
                pairs.append((dist, i, j))
    pairs.sort()
    used_p: set[int] = set()
    used_l: set[int] = set()
    tp = 0
    for _, i, j in pairs:
        if i in used_p or j in used_l:
            continue
        used_p.add(i)
        used_l.add(j)
        tp += 1
    return {"tp": tp, "fp": len(predicted) - tp, "fn": len(labeled) - tp}


@dataclass(frozen=True)
class DatasetRecord:
    image_id: str
    image_path: Path
    mask_path: Path
    boxes: tuple[BoundingBox, ...]
    labeled_anomalies: tuple[dict, ...] = ()


def load_dataset(dataset_dir: str | Path) -> list[DatasetRecord]:
    root = Path(dataset_dir)
    boxes_file = root / "boxes.json"
    if not boxes_file.is_file():
        raise FileNotFoundError(f"missing {boxes_file}")
    boxes_map = json.loads(boxes_file.read_text())
    anomalies_file = root / "anomalies.json"
    anomalies_map = (
        json.loads(anomalies_file.read_text()) if anomalies_file.is_file() else {}
    )
    records = []
    for image_id in sorted(boxes_map):
        image_path = root / "images" / f"{image_id}.png"
        mask_path = root / "masks" / f"{image_id}.png"
        records.append(
            DatasetRecord(
                image_id=image_id,
                image_path=image_path,
                mask_path=mask_path,
                boxes=tuple(BoundingBox.from_dict(b) for b in boxes_map[image_id]),
                labeled_anomalies=tuple(anomalies_map.get(image_id, ())),
            )
        )
    return records


@dataclass(frozen=True)
class EvalReport:
    strategy: str
    per_image_iou: dict[str, float]
    per_image_union_iou: dict[str, float]
    mean_iou: float
    anomaly_counts: dict[str, int]
    config: dict
    failures: dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "per_image_iou": dict(sorted(self.per_image_iou.items())),
            "per_image_union_iou": dict(sorted(self.per_image_union_iou.items())),
            "mean_iou": self.mean_iou,
            "anomaly_counts": self.anomaly_counts,
            "config": self.config,
            "failures": dict(sorted(self.failures.items())),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def run_benchmark(
    dataset: list[DatasetRecord],
    backend: SegmentationBackend,
    strategy: str,
    cfg: PipelineConfig,
) -> EvalReport:
    """Score one strategy over the dataset; per-record failures are
    recorded in the report and the run continues."""
    per_image: dict[str, float] = {}
    per_union: dict[str, float] = {}
    counts = {"tp": 0, "fp": 0, "fn": 0}
    failures: dict[str, str] = {}
    for rec in dataset:
        try:
            img = GrayscaleImage.load(rec.image_path)
            gt = BinaryMask.load(rec.mask_path)
            if (gt.height, gt.width) != (img.height, img.width):
                raise ValueError("mask dimensions differ from image")
            if not rec.boxes:
                raise ValueError("record has no boxes")
            box_ious = []
            box_masks = []
            for box in rec.boxes:
                box.validate_for(img.width, img.height)
                pred, _ = segment_with_strategy(
                    backend, img, box, cfg, strategy, image_id=rec.image_id
                )
                box_ious.append(iou(pred, clamp_to_box(gt, box)))
                box_masks.append(pred)
            united = union_masks(box_masks)
            per_image[rec.image_id] = float(np.mean(box_ious))
            per_union[rec.image_id] = iou(united, gt)
            found = detect(united, cfg)
            scored = match_anomalies(
                found, list(rec.labeled_anomalies), cfg.match_tol_radius
            )
            for k in counts:
                counts[k] += scored[k]
        except Exception as exc:  # noqa: BLE001 - per-record isolation
            failures[rec.image_id] = f"{type(exc).__name__}: {exc}"
    mean_iou = float(np.mean(list(per_image.values()))) if per_image else 0.0
    return EvalReport(
        strategy=strategy,
        per_image_iou=per_image,
        per_image_union_iou=per_union,
        mean_iou=mean_iou,
        anomaly_counts=counts,
        config=cfg.to_dict(),
        failures=failures,
    )


def format_report_table(reports: list[EvalReport]) -> str:
    """Plain-text comparison table, one row per strategy."""
    header = f"{'strategy':<10} {'MIoU':>7} {'tp':>4} {'fp':>4} {'fn':>4} {'failures':>9}"
    lines = [header, "-" * len(header)]
    for r in reports:
        c = r.anomaly_counts
        lines.append(
            f"{r.strategy:<10} {r.mean_iou:>7.3f} {c['tp']:>4} {c['fp']:>4} "
            f"{c['fn']:>4} {len(r.failures):>9}"
        )
    return "\n".join(lines) + "\n"
