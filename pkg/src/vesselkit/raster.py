"""Foundational raster types and pixel-level utilities.

Coordinate convention, fixed repo-wide: x grows rightward (columns), y grows
downward (rows), origin at the top-left, arrays stored row-major and indexed
``arr[y, x]``.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from . import _kernels

__all__ = [
    "GrayscaleImage",
    "BinaryMask",
    "BoundingBox",
    "ProbabilityMap",
    "PipelineConfig",
    "to_probability_map",
    "union_masks",
    "connected_components",
]


def _frozen_array(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(arr)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class GrayscaleImage:
    """8-bit single-channel raster, the pipeline's input substrate."""

    pixels: np.ndarray  # (H, W) uint8

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GrayscaleImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError(f"expected a non-empty 2-D raster, got shape {arr.shape}")
        if arr.dtype != np.uint8:
            raise ValueError(f"expected uint8 pixels, got {arr.dtype}")
        object.__setattr__(self, "pixels", _frozen_array(arr))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "GrayscaleImage":
        """Build from any raster array; multi-channel input is collapsed to
        a single channel by integer-rounded channel averaging."""
        arr = np.asarray(arr)
        if arr.ndim == 3:
            arr = np.rint(arr.astype(np.float64).mean(axis=2))
        return cls(np.clip(arr, 0, 255).astype(np.uint8))

    @classmethod
    def load(cls, path: str | Path) -> "GrayscaleImage":
        with Image.open(path) as im:
            return cls.from_array(np.asarray(im.convert("L") if im.mode in ("P", "1") else im))

    @classmethod
    def from_bytes(cls, data: bytes) -> "GrayscaleImage":
        with Image.open(io.BytesIO(data)) as im:
            return cls.from_array(np.asarray(im.convert("L") if im.mode in ("P", "1") else im))

    def save(self, path: str | Path) -> None:
        Image.fromarray(self.pixels, mode="L").save(path)

    def png_bytes(self) -> bytes:
        buf = io.BytesIO()
        Image.fromarray(self.pixels, mode="L").save(buf, format="PNG")
        return buf.getvalue()


@dataclass(frozen=True, eq=False)
class BinaryMask:
    """Boolean raster; True marks vessel/foreground."""

    pixels: np.ndarray  # (H, W) bool

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError(f"expected a non-empty 2-D mask, got shape {arr.shape}")
        object.__setattr__(self, "pixels", _frozen_array(arr.astype(bool)))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def count(self) -> int:
        return int(self.pixels.sum())

    @classmethod
    def load(cls, path: str | Path) -> "BinaryMask":
        # Mask rasters use 0 = background, 255 = foreground; threshold at 128.
        return cls(GrayscaleImage.load(path).pixels >= 128)

    @classmethod
    def from_bytes(cls, data: bytes) -> "BinaryMask":
        return cls(GrayscaleImage.from_bytes(data).pixels >= 128)

    def save(self, path: str | Path) -> None:
        Image.fromarray(self.pixels.astype(np.uint8) * 255, mode="L").save(path)

    def png_bytes(self) -> bytes:
        buf = io.BytesIO()
        Image.fromarray(self.pixels.astype(np.uint8) * 255, mode="L").save(buf, format="PNG")
        return buf.getvalue()


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned pixel box, inclusive-exclusive: x0 <= x < x1, y0 <= y < y1."""

    x0: int
    y0: int
    x1: int
    y1: int

    def __post_init__(self):
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise ValueError(f"degenerate box {self.as_dict()}")
        if self.x0 < 0 or self.y0 < 0:
            raise ValueError(f"negative box origin {self.as_dict()}")

    def validate_for(self, width: int, height: int) -> None:
        if self.x1 > width or self.y1 > height:
            raise ValueError(
                f"box {self.as_dict()} exceeds {width}x{height} raster bounds"
            )

    def contains(self, x: int, y: int) -> bool:
        return self.x0 <= x < self.x1 and self.y0 <= y < self.y1

    @property
    def width(self) -> int:
        return self.x1 - self.x0

    @property
    def height(self) -> int:
        return self.y1 - self.y0

    def as_dict(self) -> dict:
        return {"x0": self.x0, "y0": self.y0, "x1": self.x1, "y1": self.y1}

    @classmethod
    def from_dict(cls, d: dict) -> "BoundingBox":
        try:
            return cls(int(d["x0"]), int(d["y0"]), int(d["x1"]), int(d["y1"]))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed bounding box object: {d!r}") from exc


@dataclass(frozen=True, eq=False)
class ProbabilityMap:
    """Per-pixel vessel probability in [0, 1], same dimensions as its source."""

    values: np.ndarray  # (H, W) float64

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ProbabilityMap):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError(f"expected a non-empty 2-D map, got shape {arr.shape}")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError("probability values must lie in [0, 1]")
        object.__setattr__(self, "values", _frozen_array(arr))

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]


_CONFIG_FIELD_TYPES = {
    "probability_threshold": float,
    "sample_size": int,
    "selection_radius": float,
    "second_point_selection_radius": float,
    "exclude_radius": float,
    "refinement_iterations": int,
    "min_branch_length": int,
    "min_change_threshold": float,
    "eps_divisor": int,
    "step_divisor": int,
    "min_segment_length": int,
    "match_tol_radius": float,
    "rng_seed": int,
}


@dataclass(frozen=True)
class PipelineConfig:
    """Every tunable constant of the pipeline, with production defaults.

    Defaults: the point finder keeps pixels with vessel probability >= 0.6,
    samples 100 candidates and selects by 75 px neighbor density; the second
    point is selected with a 50 px density radius outside a 100 px exclusion
    disk around the first; refinement adds 3 more points. Centerline branches
    shorter than 40 px are pruned, and diameter deviations beyond 50% of the
    flanking mean are flagged.
    """

    probability_threshold: float = 0.6
    sample_size: int = 100
    selection_radius: float = 75.0
    second_point_selection_radius: float = 50.0
    exclude_radius: float = 100.0
    refinement_iterations: int = 3
    min_branch_length: int = 40
    min_change_threshold: float = 0.5
    eps_divisor: int = 10
    step_divisor: int = 5
    min_segment_length: int = 10
    match_tol_radius: float = 20.0
    rng_seed: int = 0

    def __post_init__(self):
        for name in ("selection_radius", "second_point_selection_radius",
                     "exclude_radius", "min_branch_length", "min_segment_length",
                     "match_tol_radius"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        for name in ("probability_threshold", "min_change_threshold"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must lie in (0, 1)")
        for name in ("eps_divisor", "step_divisor"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.sample_size < 1:
            raise ValueError("sample_size must be >= 1")
        if self.refinement_iterations < 0:
            raise ValueError("refinement_iterations must be >= 0")

    def replace(self, **overrides) -> "PipelineConfig":
        d = self.to_dict()
        d.update(overrides)
        return PipelineConfig.from_dict(d)

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in _CONFIG_FIELD_TYPES}

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        unknown = set(d) - set(_CONFIG_FIELD_TYPES)
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        kwargs = {k: _CONFIG_FIELD_TYPES[k](v) for k, v in d.items()}
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path: str | Path) -> "PipelineConfig":
        """Load from JSON or from simple ``key=value`` lines ('#' comments)."""
        import json

        text = Path(path).read_text()
        stripped = text.lstrip()
        if stripped.startswith("{"):
            return cls.from_dict(json.loads(text))
        d = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            d[key] = value
        return cls.from_dict(d)


def to_probability_map(img: GrayscaleImage) -> ProbabilityMap:
    """Map pixel intensities to vessel probabilities: darker pixels score
    higher, v -> 1 - v/255, so 0 -> 1.0 and 255 -> 0.0."""
    return ProbabilityMap(1.0 - img.pixels.astype(np.float64) / 255.0)


def union_masks(masks: list[BinaryMask]) -> BinaryMask:
    """Pixelwise union; all masks must share dimensions."""
    if not masks:
        raise ValueError("union_masks requires at least one mask")
    shape = masks[0].pixels.shape
    for m in masks[1:]:
        if m.pixels.shape != shape:
            raise ValueError(f"mask dimension mismatch: {m.pixels.shape} vs {shape}")
    out = np.zeros(shape, dtype=bool)
    for m in masks:
        np.logical_or(out, m.pixels, out=out)
    return BinaryMask(out)


def connected_components(mask: BinaryMask, connectivity: int = 8) -> tuple[np.ndarray, int]:
    """Label foreground components.

    Returns ``(labels, count)`` where labels are dense from 1 in row-major
    first-encounter order and 0 marks background.
    """
    if connectivity not in (4, 8):
        raise ValueError("connectivity must be 4 or 8")
    return _kernels.label(mask.pixels, connectivity)
