"""Centerline extraction: mask thinning, branch decomposition, spur pruning.

A skeleton is a width-1 subset of the mask foreground with the same
8-connected component count. The graph view splits it into nodes (pixels
with 1 or ≥3 skeleton neighbors, plus isolated pixels) and segments
(maximal chains of degree-2 pixels, ordered end to end).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._kernels.lut import NEIGHBOR_OFFSETS, SIMPLE
from .raster import BinaryMask


@dataclass(frozen=True, eq=False)
class Skeleton:
    data: np.ndarray

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Skeleton):
            return NotImplemented
        return np.array_equal(self.data, other.data)

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim != 2:
            raise ValueError("skeleton data must be a 2-D bool array")
        frozen = arr.astype(bool)
        frozen.setflags(write=False)
        object.__setattr__(self, "data", frozen)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    def count(self) -> int:
        return int(self.data.sum())

    def to_mask(self) -> BinaryMask:
        return BinaryMask(self.data.copy())


@dataclass(frozen=True)
class SkeletonNode:
    x: int
    y: int
    kind: str  # "end" (≤1 neighbor) or "branch" (≥3 neighbors)

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "kind": self.kind}


@dataclass(frozen=True)
class VesselSegment:
    id: int
    points: tuple[tuple[int, int], ...]  # ordered (x, y), consecutive 8-adjacent

    @property
    def length(self) -> int:
        return len(self.points)

    def to_dict(self) -> dict:
        return {"id": self.id, "points": [[x, y] for x, y in self.points]}


@dataclass(frozen=True)
class SkeletonGraph:
    width: int
    height: int
    nodes: tuple[SkeletonNode, ...]
    segments: tuple[VesselSegment, ...]

    def to_dict(self) -> dict:
        return {
            "nodes": [n.to_dict() for n in self.nodes],
            "segments": [s.to_dict() for s in self.segments],
        }

    def pixel_array(self) -> np.ndarray:
        arr = np.zeros((self.height, self.width), dtype=bool)
        for n in self.nodes:
            arr[n.y, n.x] = True
        for s in self.segments:
            for x, y in s.points:
                arr[y, x] = True
        return arr


def _neighbor_counts(arr: np.ndarray) -> np.ndarray:
    h, w = arr.shape
    padded = np.zeros((h + 2, w + 2), dtype=np.uint8)
    padded[1:-1, 1:-1] = arr
    counts = np.zeros((h, w), dtype=np.uint8)
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dy == 0 and dx == 0:
                continue
            counts += padded[1 + dy:1 + dy + h, 1 + dx:1 + dx + w]
    return counts


def _neighbor_code(arr: np.ndarray, y: int, x: int) -> int:
    h, w = arr.shape
    code = 0
    for i, (dy, dx) in enumerate(NEIGHBOR_OFFSETS):
        ny, nx = y + dy, x + dx
        if 0 <= ny < h and 0 <= nx < w and arr[ny, nx]:
            code |= 1 << i
    return code


def _break_blocks(arr: np.ndarray) -> np.ndarray:
    """Remove one pixel from each remaining fully-set 2×2 block.

    Thinning can stall on thick junction crossings where every block pixel
    fails the local topology test. Deleting a topologically simple pixel is
    always safe; otherwise any pixel whose removal keeps the global
    component count is accepted (this may close a junction into a tiny
    loop, which the graph decomposition handles). A block whose pixels all
    fail both tests is left alone: connectivity outranks width-1 here.
    """
    arr = arr.copy()
    _, n_components = _kernels.label(arr, 8)
    while True:
        blocks = np.argwhere(
            arr[:-1, :-1] & arr[1:, :-1] & arr[:-1, 1:] & arr[1:, 1:]
        )
        if len(blocks) == 0:
            return arr
        progressed = False
        for y, x in blocks:
            corners = ((y, x), (y, x + 1), (y + 1, x), (y + 1, x + 1))
            if not all(arr[p] for p in corners):
                continue  # an earlier deletion already broke this block
            removed = False
            for p in corners:
                if SIMPLE[_neighbor_code(arr, *p)]:
                    arr[p] = False
                    removed = True
                    break
            if not removed:
                for p in corners:
                    arr[p] = False
                    _, n_after = _kernels.label(arr, 8)
                    if n_after == n_components:
                        removed = True
                        break
                    arr[p] = True
            progressed = progressed or removed
        if not progressed:
            return arr


def skeletonize(mask: BinaryMask) -> Skeleton:
    """Thin the mask to a width-1 centerline, preserving component count.

    Runs thinning and block cleanup to a joint fixed point (cleanup can
    expose new thinnable pixels), so the result is idempotent.
    """
    arr = np.asarray(_kernels.thin(mask.pixels.astype(np.uint8)), dtype=bool)
    while True:
        after = np.asarray(
            _kernels.thin(_break_blocks(arr).astype(np.uint8)), dtype=bool
        )
        if np.array_equal(after, arr):
            return Skeleton(after)
        arr = after


def decompose(sk: Skeleton) -> SkeletonGraph:
    """Split a skeleton into nodes and ordered degree-2 chains.

    Chain order is deterministic: a path starts at its (y, x)-smaller
    endpoint; a pure cycle is broken at its (y, x)-smallest pixel and
    walks toward the smaller neighbor first.
    """
    arr = sk.data
    counts = _neighbor_counts(arr)
    node_mask = arr & (counts != 2)
    chain_mask = arr & (counts == 2)

    nodes = tuple(
        SkeletonNode(int(x), int(y), "end" if counts[y, x] <= 1 else "branch")
        for y, x in np.argwhere(node_mask)
    )

    labels, n_chains = _kernels.label(chain_mask, 8)
    offsets = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))
    h, w = arr.shape
    segments = []
    for cid in range(1, n_chains + 1):
        pix = [(int(y), int(x)) for y, x in np.argwhere(labels == cid)]
        pix_set = set(pix)

        def chain_neighbors(p):
            y, x = p
            return [
                (y + dy, x + dx)
                for dy, dx in offsets
                if 0 <= y + dy < h and 0 <= x + dx < w and (y + dy, x + dx) in pix_set
            ]

        ends = sorted(p for p in pix if len(chain_neighbors(p)) <= 1)
        if ends:
            start = ends[0]
        else:
            start = min(pix)
        path = [start]
        visited = {start}
        current = start
        while True:
            nxt = sorted(p for p in chain_neighbors(current) if p not in visited)
            if not nxt:
                break
            current = nxt[0]
            path.append(current)
            visited.add(current)
        segments.append(
            VesselSegment(cid - 1, tuple((x, y) for y, x in path))
        )

    return SkeletonGraph(sk.width, sk.height, nodes, tuple(segments))


def _removable(graph: SkeletonGraph, min_branch_length: int) -> list[VesselSegment]:
    end_nodes = {(n.x, n.y) for n in graph.nodes if n.kind == "end"}

    def terminal(seg: VesselSegment) -> bool:
        for px, py in (seg.points[0], seg.points[-1]):
            for dy in (-1, 0, 1):
                for dx in (-1, 0, 1):
                    if (px + dx, py + dy) in end_nodes:
                        return True
        return False

    short = [s for s in graph.segments if terminal(s) and s.length < min_branch_length]
    if short and len(short) == len(graph.segments):
        # All segments qualify: keep the longest so downstream stages
        # still have a centerline.
        keep = max(graph.segments, key=lambda s: (s.length, -s.id))
        short = [s for s in short if s.id != keep.id]
    return short


def prune(graph: SkeletonGraph, min_branch_length: int) -> Skeleton:
    """Iteratively delete terminal chains shorter than min_branch_length.

    Each pass also deletes the end nodes hanging off removed chains, then
    re-thins (junction pixels can be left 2-wide) and re-decomposes, until
    no short terminal chain remains. Chains joining two branchpoints are
    never touched; if everything qualifies the longest chain is kept.
    """
    arr = graph.pixel_array()
    while True:
        removable = _removable(graph, min_branch_length)
        # zero-length spurs: an end node sitting directly on a branch node
        # has no chain pixels, so no segment represents it
        branch_px = {(n.x, n.y) for n in graph.nodes if n.kind == "branch"}
        zero_spurs = {
            (n.x, n.y)
            for n in graph.nodes
            if n.kind == "end"
            and any(
                (n.x + dx, n.y + dy) in branch_px
                for dy in (-1, 0, 1)
                for dx in (-1, 0, 1)
            )
        }
        if not removable and not zero_spurs:
            return Skeleton(arr)
        drop = {p for s in removable for p in s.points} | zero_spurs
        kept_points = {
            p for s in graph.segments if s.id not in {r.id for r in removable}
            for p in s.points
        }
        for node in graph.nodes:
            if node.kind != "end":
                continue
            adjacent_dropped = any(
                (node.x + dx, node.y + dy) in drop
                for dy in (-1, 0, 1)
                for dx in (-1, 0, 1)
            )
            if adjacent_dropped and not any(
                (node.x + dx, node.y + dy) in kept_points
                for dy in (-1, 0, 1)
                for dx in (-1, 0, 1)
            ):
                drop.add((node.x, node.y))
        for x, y in drop:
            arr[y, x] = False
        arr = _break_blocks(_kernels.thin(arr.astype(np.uint8)))
        graph = decompose(Skeleton(arr))
