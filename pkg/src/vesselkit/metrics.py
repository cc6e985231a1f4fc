"""Distance-transform radius estimation along centerline segments."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import SegmentOutsideFieldError
from .raster import BinaryMask
from .skeleton import VesselSegment


@dataclass(frozen=True, eq=False)
class DistanceField:
    """Per-pixel exact Euclidean distance to the nearest background pixel.

    0 on background. At a centerline pixel the value estimates the vessel
    radius in pixels (not diameter; downstream ratios cancel the factor).
    """

    data: np.ndarray  # (H, W) float64

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DistanceField):
            return NotImplemented
        return np.array_equal(self.data, other.data)

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError("distance field must be 2-D")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    def at(self, x: int, y: int) -> float:
        return float(self.data[y, x])


@dataclass(frozen=True)
class ThicknessProfile:
    """Radius estimate per centerline pixel, in segment order."""

    segment_id: int
    values: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.values)

    def to_dict(self) -> dict:
        return {"segment": self.segment_id, "values": list(self.values)}


def distance_transform(mask: BinaryMask) -> DistanceField:
    """Exact (not chamfer-approximate) Euclidean distance transform."""
    return DistanceField(_kernels.edt(mask.pixels))


def thickness_profile(segment: VesselSegment, field: DistanceField) -> ThicknessProfile:
    """Read the field at every segment pixel, preserving order."""
    for x, y in segment.points:
        if not (0 <= x < field.width and 0 <= y < field.height):
            raise SegmentOutsideFieldError(
                f"segment {segment.id} pixel ({x},{y}) outside "
                f"{field.width}x{field.height} field"
            )
    return ThicknessProfile(
        segment.id, tuple(field.at(x, y) for x, y in segment.points)
    )
