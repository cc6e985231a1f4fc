"""Synthetic test scenes with analytically known ground truth.

Bar phantoms: horizontal vessels whose half-width profile is controlled
per column, so the expected centerline radius is exact: a bar occupying
rows [cy-hw, cy+hw] has distance-transform value hw+1 on its centerline.
A 9→3 waist therefore grades as (4-10)/10 = -0.6 and a 9→17 bulge as
(18-10)/10 = +0.8.

The synthetic angiogram pairs a dark vessel tree with a few small darker
distractor blobs. The single darkest pixel always sits in a distractor,
which defeats pick-the-darkest-pixel point selection while leaving
density-based selection on the vessel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .raster import BinaryMask, BoundingBox, GrayscaleImage


def _column_bar(width: int, height: int, x_start: int, x_end: int,
                halfwidths: np.ndarray) -> BinaryMask:
    cy = height // 2
    arr = np.zeros((height, width), dtype=bool)
    for i, x in enumerate(range(x_start, x_end)):
        hw = int(halfwidths[i])
        arr[cy - hw:cy + hw + 1, x] = True
    return BinaryMask(arr)


def bar_mask(width: int = 448, height: int = 386, half_width: int = 9,
             x_start: int = 20, x_end: int = 428) -> BinaryMask:
    """Constant-width horizontal bar; centerline radius = half_width + 1."""
    hw = np.full(x_end - x_start, half_width)
    return _column_bar(width, height, x_start, x_end, hw)


def _waisted_halfwidths(n: int, outer: int, inner: int, taper: int,
                        plateau: int) -> np.ndarray:
    hw = np.full(n, float(outer))
    center = n // 2
    half_plateau = plateau // 2
    for i in range(n):
        d = abs(i - center)
        if d <= half_plateau:
            hw[i] = inner
        elif d <= half_plateau + taper:
            t = (d - half_plateau) / taper
            hw[i] = inner + (outer - inner) * t
    return np.rint(hw)


def stenosis_bar(width: int = 448, height: int = 386, half_width: int = 9,
                 waist_half_width: int = 3, taper: int = 40,
                 plateau: int = 21) -> BinaryMask:
    """Bar with a central symmetric narrowing; expected changeP = -0.6."""
    x_start, x_end = 20, width - 20
    hw = _waisted_halfwidths(x_end - x_start, half_width, waist_half_width,
                             taper, plateau)
    return _column_bar(width, height, x_start, x_end, hw)


def aneurysm_bar(width: int = 448, height: int = 386, half_width: int = 9,
                 bulge_half_width: int = 17, taper: int = 40,
                 plateau: int = 21) -> BinaryMask:
    """Bar with a central symmetric bulge; expected changeP = +0.8."""
    x_start, x_end = 20, width - 20
    hw = _waisted_halfwidths(x_end - x_start, half_width, bulge_half_width,
                             taper, plateau)
    return _column_bar(width, height, x_start, x_end, hw)


def random_blob_mask(seed: int, width: int = 64, height: int = 64) -> BinaryMask:
    """Union of a few random disks; used for invariant checks."""
    rng = np.random.default_rng(seed)
    arr = np.zeros((height, width), dtype=bool)
    yy, xx = np.mgrid[0:height, 0:width]
    for _ in range(int(rng.integers(3, 8))):
        r = int(rng.integers(3, 9))
        cy = int(rng.integers(r, height - r))
        cx = int(rng.integers(r, width - r))
        arr |= (yy - cy) ** 2 + (xx - cx) ** 2 <= r * r
    return BinaryMask(arr)


def _stamp_disk(arr: np.ndarray, cx: float, cy: float, r: float) -> None:
    h, w = arr.shape
    y0, y1 = max(0, int(cy - r) - 1), min(h, int(cy + r) + 2)
    x0, x1 = max(0, int(cx - r) - 1), min(w, int(cx + r) + 2)
    yy, xx = np.mgrid[y0:y1, x0:x1]
    arr[y0:y1, x0:x1] |= (yy - cy) ** 2 + (xx - cx) ** 2 <= r * r


def _walk(arr: np.ndarray, rng: np.random.Generator, x: float, y: float,
          theta: float, half_width: float, y_lo: int, y_hi: int,
          x_hi: int) -> list[tuple[float, float]]:
    path = []
    while x < x_hi and y_lo < y < y_hi:
        _stamp_disk(arr, x, y, half_width)
        path.append((x, y))
        theta = float(np.clip(theta + rng.uniform(-0.06, 0.06), -0.6, 0.6))
        x += np.cos(theta)
        y += np.sin(theta)
    return path


def y_vessel(width: int = 220, height: int = 220,
             half_width: int = 6) -> tuple[GrayscaleImage, BinaryMask, BoundingBox]:
    """Dark Y-shaped vessel on a white background."""
    arr = np.zeros((height, width), dtype=bool)
    cx = width // 2
    for y in range(height - 30, height // 2, -1):
        _stamp_disk(arr, cx, y, half_width)
    for i in range(height // 2 - 20):
        _stamp_disk(arr, cx - 0.8 * i, height // 2 - i, half_width)
        _stamp_disk(arr, cx + 0.8 * i, height // 2 - i, half_width)
    img = np.full((height, width), 255, dtype=np.uint8)
    img[arr] = 40
    return (
        GrayscaleImage(img),
        BinaryMask(arr),
        BoundingBox(10, 10, width - 10, height - 10),
    )


@dataclass(frozen=True)
class PhantomScene:
    image: GrayscaleImage
    vessel_mask: BinaryMask
    box: BoundingBox
    anomalies: tuple[dict, ...]


def synthetic_angiogram(seed: int, width: int = 448,
                        height: int = 386) -> PhantomScene:
    """Vessel tree (value 45) plus small darker distractor blobs.

    Distractors sit at least 80 px from the vessel and carry the image's
    darkest pixels (one blob at 15, the rest at 25), so they are inside
    the candidate set at the default probability threshold yet never the
    densest region.
    """
    rng = np.random.default_rng(seed)
    vessel = np.zeros((height, width), dtype=bool)

    hw = float(rng.uniform(6.0, 8.0))
    y0 = float(rng.uniform(height * 0.35, height * 0.65))
    path = _walk(vessel, rng, 30.0, y0, float(rng.uniform(-0.2, 0.2)),
                 hw, 30, height - 30, width - 30)
    # one side branch from the middle third of the trunk
    fork_at = path[int(len(path) * float(rng.uniform(0.35, 0.6)))]
    fork_dir = float(rng.choice((-1.0, 1.0)) * rng.uniform(0.45, 0.7))
    _walk(vessel, rng, fork_at[0], fork_at[1], fork_dir, hw - 2.0,
          30, height - 30, width - 30)

    # distance from any pixel to the vessel = edt of the complement
    from . import _kernels

    to_vessel = _kernels.edt(~vessel)
    img = np.full((height, width), 255, dtype=np.uint8)
    img[vessel] = 45

    centers: list[tuple[int, int]] = []
    tries = 0
    while len(centers) < 4 and tries < 4000:
        tries += 1
        cx = int(rng.integers(25, width - 25))
        cy = int(rng.integers(25, height - 25))
        if to_vessel[cy, cx] < 80:
            continue
        if any((cx - ox) ** 2 + (cy - oy) ** 2 < 60 ** 2 for ox, oy in centers):
            continue
        centers.append((cx, cy))
    blobs = np.zeros_like(vessel)
    for i, (cx, cy) in enumerate(centers):
        _stamp_disk(blobs, cx, cy, float(rng.uniform(4.0, 5.5)))
        img[blobs & (img == 255)] = 15 if i == 0 else 25

    return PhantomScene(
        image=GrayscaleImage(img),
        vessel_mask=BinaryMask(vessel),
        box=BoundingBox(10, 10, width - 10, height - 10),
        anomalies=(),
    )
