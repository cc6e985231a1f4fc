"""Stenosis/aneurysm detection along pruned centerlines.

Per segment: find raw local extremums of the radius profile, cluster them
by index (density clustering with minSamples=1, which reduces to
single-linkage at distance eps), keep cluster centers that are extremal
against their neighboring centers, then flag centers whose radius deviates
from the mean flanking radius by more than the change threshold. The
signed relative deviation (changeP) grades severity: negative = stenosis,
positive = aneurysm.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .errors import SegmentTooShortError
from .metrics import DistanceField, ThicknessProfile, distance_transform, thickness_profile
from .raster import BinaryMask, PipelineConfig
from .skeleton import VesselSegment, decompose, prune, skeletonize

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExtremumPoint:
    index: int
    value: float
    kind: str  # "min" | "max"


@dataclass(frozen=True)
class AnomalyFinding:
    segment_id: int
    x: int
    y: int
    index: int
    kind: str  # "stenosis" | "aneurysm"
    change_p: float
    reference_radius: float  # mean of the two flanking radii, px

    def to_dict(self) -> dict:
        return {
            "segment": self.segment_id,
            "x": self.x,
            "y": self.y,
            "index": self.index,
            "kind": self.kind,
            "change_p": self.change_p,
            "reference_radius_px": self.reference_radius,
        }


def _raw_extremums(values: tuple[float, ...]) -> list[ExtremumPoint]:
    """Strict local extremums; a plateau counts once, at its center index.

    A run is an extremum only when unequal neighbors exist on both sides
    (boundary plateaus are not extremums).
    """
    out = []
    n = len(values)
    start = 0
    while start < n:
        end = start
        while end + 1 < n and values[end + 1] == values[start]:
            end += 1
        if start > 0 and end < n - 1:
            left, v, right = values[start - 1], values[start], values[end + 1]
            if v < left and v < right:
                out.append(ExtremumPoint((start + end) // 2, v, "min"))
            elif v > left and v > right:
                out.append(ExtremumPoint((start + end) // 2, v, "max"))
        start = end + 1
    return out


def cluster_indices(indices: list[int], eps: float) -> list[list[int]]:
    """Group sorted indices whose neighbors lie within eps.

    With minSamples = 1 every point is a core point, so density clusters
    coincide with single-linkage components at distance eps: a sorted gap
    greater than eps starts a new cluster.
    """
    if not indices:
        return []
    indices = sorted(indices)
    clusters = [[indices[0]]]
    for idx in indices[1:]:
        if idx - clusters[-1][-1] <= eps:
            clusters[-1].append(idx)
        else:
            clusters.append([idx])
    return clusters


def extract_extremums(profile: ThicknessProfile, cfg: PipelineConfig) -> list[ExtremumPoint]:
    """Raw extremums → index clusters → filtered cluster centers."""
    values = profile.values
    n = len(values)
    if n < cfg.min_segment_length:
        raise SegmentTooShortError(
            f"profile of segment {profile.segment_id} has {n} samples, "
            f"need at least {cfg.min_segment_length}"
        )
    raws = _raw_extremums(values)
    if not raws:
        return []

    eps = max(1.0, n / cfg.eps_divisor)
    clusters = cluster_indices([r.index for r in raws], eps)
    raw_by_index = {r.index: r for r in raws}

    centers = []
    for cl in clusters:
        center = int(sum(cl) / len(cl))
        nearest = min(cl, key=lambda i: (abs(i - center), i))
        centers.append((center, values[center], raw_by_index[nearest].kind))

    if len(centers) < 3:
        # Too few centers for a bilateral comparison; keep them as-is
        # (a lone deep dip on an otherwise flat profile is still an
        # extremum worth grading).
        return [ExtremumPoint(i, v, k) for i, v, k in centers]

    survivors = []
    for j in range(1, len(centers) - 1):
        i, v, _ = centers[j]
        prev_v = centers[j - 1][1]
        next_v = centers[j + 1][1]
        if v < prev_v and v < next_v:
            survivors.append(ExtremumPoint(i, v, "min"))
        elif v > prev_v and v > next_v:
            survivors.append(ExtremumPoint(i, v, "max"))
    return survivors


def flag_and_grade(
    segment: VesselSegment,
    profile: ThicknessProfile,
    field: DistanceField,
    extremums: list[ExtremumPoint],
    cfg: PipelineConfig,
) -> list[AnomalyFinding]:
    """Threshold extremums against flanking radii and grade the survivors.

    Flanks sit step = len // stepDivisor indices away, clamped to the
    segment. changeP = (dt_p − mean(dt_e1, dt_e2)) / mean(dt_e1, dt_e2),
    where the dt values are distance-field reads at segment pixels.
    """
    n = len(profile.values)
    step = n // cfg.step_divisor
    findings = []
    for ext in extremums:
        i = ext.index
        i1 = max(0, i - step)
        i2 = min(n - 1, i + step)
        mean_flank = (profile.values[i1] + profile.values[i2]) / 2.0
        if mean_flank == 0:
            log.warning(
                "segment %d extremum at %d: zero flanking radius, skipped",
                segment.id, i,
            )
            continue
        if abs(profile.values[i] - mean_flank) / mean_flank <= cfg.min_change_threshold:
            continue
        dt_p = field.at(*segment.points[i])
        dt_e = (field.at(*segment.points[i1]) + field.at(*segment.points[i2])) / 2.0
        change_p = (dt_p - dt_e) / dt_e
        if change_p == 0:
            continue
        x, y = segment.points[i]
        findings.append(
            AnomalyFinding(
                segment_id=segment.id,
                x=x,
                y=y,
                index=i,
                kind="stenosis" if change_p < 0 else "aneurysm",
                change_p=change_p,
                reference_radius=dt_e,
            )
        )
    return findings


def detect(mask: BinaryMask, cfg: PipelineConfig) -> list[AnomalyFinding]:
    """Full per-mask pass: skeletonize, prune, profile, flag, grade."""
    if mask.count() == 0:
        return []
    pruned = prune(decompose(skeletonize(mask)), cfg.min_branch_length)
    field = distance_transform(mask)
    findings = []
    for segment in decompose(pruned).segments:
        if segment.length < cfg.min_segment_length:
            continue
        profile = thickness_profile(segment, field)
        extremums = extract_extremums(profile, cfg)
        findings.extend(flag_and_grade(segment, profile, field, extremums, cfg))
    return findings
