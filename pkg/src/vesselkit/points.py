"""Positive prompt-point selection over the probability map.

Candidates are the in-box pixels at or above the probability threshold,
minus any exclusion mask/disks. Selection samples up to sampleSize
candidates and keeps the sample point with the most sampled neighbors
within the density radius; ties fall to the higher-probability point,
then to (y, x) order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoCandidatesError
from .raster import BinaryMask, BoundingBox, ProbabilityMap


@dataclass(frozen=True)
class PromptPoint:
    x: int
    y: int
    label: int = 1  # 1 positive, 0 negative

    def __post_init__(self):
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label}")

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "label": self.label}

    @classmethod
    def from_dict(cls, d: dict) -> "PromptPoint":
        return cls(int(d["x"]), int(d["y"]), int(d.get("label", 1)))


@dataclass(frozen=True)
class CandidateSet:
    xs: np.ndarray  # int32
    ys: np.ndarray  # int32
    probabilities: np.ndarray  # float64, aligned with xs/ys
    source_box: BoundingBox

    def __post_init__(self):
        for name in ("xs", "ys", "probabilities"):
            arr = np.asarray(getattr(self, name)).copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (len(self.xs) == len(self.ys) == len(self.probabilities)):
            raise ValueError("candidate arrays must align")

    def __len__(self) -> int:
        return len(self.xs)


def build_candidates(
    pm: ProbabilityMap,
    box: BoundingBox,
    threshold: float,
    excluded: BinaryMask | None = None,
    excluded_disks: tuple[tuple[tuple[int, int], float], ...] = (),
) -> CandidateSet:
    """All in-box pixels with probability ≥ threshold, outside exclusions.

    excluded_disks entries are ((cx, cy), radius); a candidate must lie at
    Euclidean distance strictly greater than radius from every center.
    """
    box.validate_for(pm.width, pm.height)
    keep = pm.values[box.y0:box.y1, box.x0:box.x1] >= threshold
    if excluded is not None:
        if (excluded.height, excluded.width) != pm.values.shape:
            raise ValueError("exclusion mask dimensions must match the map")
        keep &= ~excluded.pixels[box.y0:box.y1, box.x0:box.x1]
    ys, xs = np.nonzero(keep)
    xs = xs + box.x0
    ys = ys + box.y0
    for (cx, cy), radius in excluded_disks:
        inside = (xs - cx) ** 2 + (ys - cy) ** 2 <= radius * radius
        xs, ys = xs[~inside], ys[~inside]
    return CandidateSet(
        xs.astype(np.int32),
        ys.astype(np.int32),
        pm.values[ys, xs].astype(np.float64),
        box,
    )


def pick_point(
    cands: CandidateSet,
    density_radius: float,
    sample_size: int,
    rng: np.random.Generator,
) -> tuple[int, int]:
    """The sampled candidate with the most sampled neighbors in radius."""
    n = len(cands)
    if n == 0:
        raise NoCandidatesError("no vessel-probable pixels available")
    if n > sample_size:
        chosen = rng.choice(n, size=sample_size, replace=False)
    else:
        chosen = np.arange(n)
    xs = cands.xs[chosen].astype(np.float64)
    ys = cands.ys[chosen].astype(np.float64)
    probs = cands.probabilities[chosen]

    d2 = (xs[:, None] - xs[None, :]) ** 2 + (ys[:, None] - ys[None, :]) ** 2
    counts = (d2 <= density_radius * density_radius).sum(axis=1) - 1  # drop self

    best = max(
        range(len(chosen)),
        key=lambda i: (counts[i], probs[i], -ys[i], -xs[i]),
    )
    return int(xs[best]), int(ys[best])
