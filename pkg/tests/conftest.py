from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from vesselkit.phantoms import synthetic_angiogram
from vesselkit.raster import BinaryMask


def random_mask(rng: np.random.Generator, h: int = 64, w: int = 64,
                density: float = 0.45) -> np.ndarray:
    return rng.random((h, w)) < density


def brute_force_edt(mask: np.ndarray) -> np.ndarray:
    """Independent O(n^2) oracle: per-pixel scan over every background pixel."""
    h, w = mask.shape
    out = np.zeros((h, w), dtype=np.float64)
    bg = np.argwhere(~mask)
    if bg.size == 0:
        out[mask] = np.inf
        return out
    for y in range(h):
        for x in range(w):
            if mask[y, x]:
                d2 = (bg[:, 0] - y) ** 2 + (bg[:, 1] - x) ** 2
                out[y, x] = np.sqrt(d2.min())
    return out


def union_find_clusters(indices: list[int], eps: float) -> list[list[int]]:
    """Independent single-linkage oracle: union every pair within eps."""
    n = len(indices)
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(n):
        for j in range(i + 1, n):
            if abs(indices[i] - indices[j]) <= eps:
                ra, rb = find(i), find(j)
                if ra != rb:
                    parent[ra] = rb
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(indices[i])
    return sorted((sorted(g) for g in groups.values()), key=lambda g: g[0])


def write_phantom_dataset(root: Path, seeds: list[int]) -> Path:
    (root / "images").mkdir(parents=True)
    (root / "masks").mkdir()
    boxes = {}
    for seed in seeds:
        scene = synthetic_angiogram(seed=seed)
        name = f"phantom_{seed:03d}"
        scene.image.save(root / "images" / f"{name}.png")
        scene.vessel_mask.save(root / "masks" / f"{name}.png")
        boxes[name] = [scene.box.as_dict()]
    (root / "boxes.json").write_text(json.dumps(boxes, indent=2, sort_keys=True))
    return root


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)


def masks_equal(a: BinaryMask, b: BinaryMask) -> bool:
    return bool(np.array_equal(a.pixels, b.pixels))
