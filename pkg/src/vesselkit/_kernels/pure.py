"""Pure-Python (numpy) implementations of the hot raster kernels.

Import-time fallback when the compiled extension is unavailable; the
compiled module implements identical semantics and the test suite asserts
bit-equality between the two.
"""

from collections import deque

import numpy as np

from .lut import DELETABLE, NEIGHBOR_OFFSETS


def _neighbor_codes(padded: np.ndarray, h: int, w: int) -> np.ndarray:
    code = np.zeros((h, w), dtype=np.uint8)
    for i, (dy, dx) in enumerate(NEIGHBOR_OFFSETS):
        code |= padded[1 + dy:1 + dy + h, 1 + dx:1 + dx + w] << i
    return code


def thin(mask: np.ndarray) -> np.ndarray:
    """Peel boundary pixels in four alternating subfields until stable.

    Pixels of one subfield are never 8-adjacent, so deleting a whole
    subfield batch at once equals sequential deletion; every deletion is
    topology-preserving by the LUT test, and line tips are protected.
    """
    h, w = mask.shape
    padded = np.zeros((h + 2, w + 2), dtype=np.uint8)
    padded[1:-1, 1:-1] = mask
    core = padded[1:-1, 1:-1]

    subfields = []
    for a, b in ((0, 0), (0, 1), (1, 0), (1, 1)):
        grid = np.zeros((h, w), dtype=bool)
        grid[a::2, b::2] = True
        subfields.append(grid)

    while True:
        changed = False
        for grid in subfields:
            codes = _neighbor_codes(padded, h, w)
            batch = (core == 1) & DELETABLE[codes].astype(bool) & grid
            if batch.any():
                core[batch] = 0
                changed = True
        if not changed:
            return core.astype(bool)


def _edt_1d_sq(f: np.ndarray) -> np.ndarray:
    """Exact 1-D squared distance under sample costs f, by lower envelope
    of the parabolas y = (x - k)^2 + f[k]."""
    n = f.shape[0]
    v = np.zeros(n, dtype=np.intp)
    z = np.empty(n + 1, dtype=np.float64)
    z[0], z[1] = -np.inf, np.inf
    k = 0
    fv = f.astype(np.float64)
    for q in range(1, n):
        fq = fv[q] + q * q
        s = (fq - (fv[v[k]] + v[k] * v[k])) / (2.0 * (q - v[k]))
        while s <= z[k]:
            k -= 1
            s = (fq - (fv[v[k]] + v[k] * v[k])) / (2.0 * (q - v[k]))
        k += 1
        v[k] = q
        z[k] = s
        z[k + 1] = np.inf
    out = np.empty(n, dtype=np.float64)
    k = 0
    for q in range(n):
        while z[k + 1] < q:
            k += 1
        dq = q - v[k]
        out[q] = dq * dq + fv[v[k]]
    return out


def edt(mask: np.ndarray) -> np.ndarray:
    """Exact Euclidean distance to the nearest background pixel.

    Two-pass: per-column nearest-background sweep, then a per-row lower
    envelope over squared distances. 0 on background; +inf when the mask
    has no background at all.
    """
    fg = mask.astype(bool)
    h, w = fg.shape
    if not fg.any():
        return np.zeros((h, w), dtype=np.float64)
    if fg.all():
        return np.full((h, w), np.inf, dtype=np.float64)

    inf_dist = h + w
    g = np.where(fg, inf_dist, 0).astype(np.int64)
    for y in range(1, h):
        np.minimum(g[y], g[y - 1] + 1, out=g[y])
    for y in range(h - 2, -1, -1):
        np.minimum(g[y], g[y + 1] + 1, out=g[y])

    f = g * g
    out = np.empty((h, w), dtype=np.float64)
    for y in range(h):
        row = f[y]
        if not row.any():
            out[y] = 0.0
        else:
            out[y] = _edt_1d_sq(row)
    return np.sqrt(out)


_OFFSETS_4 = ((-1, 0), (0, -1), (0, 1), (1, 0))
_OFFSETS_8 = NEIGHBOR_OFFSETS


def label(mask: np.ndarray, connectivity: int = 8) -> tuple[np.ndarray, int]:
    """Flood-fill component labeling; labels dense from 1 in row-major
    first-encounter order, 0 for background."""
    offsets = _OFFSETS_8 if connectivity == 8 else _OFFSETS_4
    fg = mask.astype(bool)
    h, w = fg.shape
    labels = np.zeros((h, w), dtype=np.int32)
    count = 0
    ys, xs = np.nonzero(fg)
    for y0, x0 in zip(ys.tolist(), xs.tolist()):
        if labels[y0, x0]:
            continue
        count += 1
        queue = deque([(y0, x0)])
        labels[y0, x0] = count
        while queue:
            y, x = queue.popleft()
            for dy, dx in offsets:
                ny, nx = y + dy, x + dx
                if 0 <= ny < h and 0 <= nx < w and fg[ny, nx] and not labels[ny, nx]:
                    labels[ny, nx] = count
                    queue.append((ny, nx))
    return labels, count
