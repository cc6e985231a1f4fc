"""Lookup tables for the thinning kernel.

A foreground pixel's 8-neighborhood is encoded as one byte, bit i set when
the neighbor at ``NEIGHBOR_OFFSETS[i]`` is foreground. ``DELETABLE[code]``
answers whether peeling that pixel preserves topology: the foreground
neighbors must form exactly one 8-connected component, the background must
reach the pixel through exactly one 4-connected component, and the pixel
must not be a line tip (fewer than two neighbors).
"""

import numpy as np

# (dy, dx), bit order: N, NE, E, SE, S, SW, W, NW
NEIGHBOR_OFFSETS = (
    (-1, 0), (-1, 1), (0, 1), (1, 1),
    (1, 0), (1, -1), (0, -1), (-1, -1),
)

_FOUR_ADJACENT_BITS = frozenset(
    i for i, (dy, dx) in enumerate(NEIGHBOR_OFFSETS) if abs(dy) + abs(dx) == 1
)


def _components(cells: list[tuple[int, int]], diagonal: bool) -> list[set[tuple[int, int]]]:
    comps: list[set[tuple[int, int]]] = []
    remaining = set(cells)
    while remaining:
        seed = remaining.pop()
        comp = {seed}
        frontier = [seed]
        while frontier:
            cy, cx = frontier.pop()
            for oy, ox in remaining.copy():
                dy, dx = abs(cy - oy), abs(cx - ox)
                adjacent = max(dy, dx) == 1 if diagonal else dy + dx == 1
                if adjacent:
                    remaining.discard((oy, ox))
                    comp.add((oy, ox))
                    frontier.append((oy, ox))
        comps.append(comp)
    return comps


def _is_simple(code: int) -> bool:
    fg = [NEIGHBOR_OFFSETS[i] for i in range(8) if code >> i & 1]
    if not fg:
        return False
    if len(_components(fg, diagonal=True)) != 1:
        return False
    bg = [NEIGHBOR_OFFSETS[i] for i in range(8) if not code >> i & 1]
    touching = {NEIGHBOR_OFFSETS[i] for i in _FOUR_ADJACENT_BITS if not code >> i & 1}
    comps = [c for c in _components(bg, diagonal=False) if c & touching]
    return len(comps) == 1


def _build() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    simple = np.zeros(256, dtype=np.uint8)
    count = np.zeros(256, dtype=np.uint8)
    for code in range(256):
        simple[code] = _is_simple(code)
        count[code] = bin(code).count("1")
    deletable = (simple.astype(bool) & (count >= 2)).astype(np.uint8)
    return simple, count, deletable


SIMPLE, NEIGHBOR_COUNT, DELETABLE = _build()
