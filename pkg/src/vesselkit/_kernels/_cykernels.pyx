# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot raster kernels.

Semantics are identical to the pure-numpy module; the test suite asserts
bit-equality between the two backends.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY

from .lut import DELETABLE

cnp.import_array()

cdef int[8] _DY = [-1, -1, 0, 1, 1, 1, 0, -1]
cdef int[8] _DX = [0, 1, 1, 1, 0, -1, -1, -1]


def thin(mask):
    """Peel boundary pixels in four alternating subfields until stable.

    In-place deletion within a subfield pass is safe: pixels of one
    subfield are never 8-adjacent, so no deletion can change another
    candidate's neighbor code mid-pass.
    """
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] padded
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] deletable = DELETABLE
    cdef Py_ssize_t h = mask.shape[0]
    cdef Py_ssize_t w = mask.shape[1]
    cdef Py_ssize_t y, x, i
    cdef int a, b, sub, code
    cdef bint changed

    padded = np.zeros((h + 2, w + 2), dtype=np.uint8)
    padded[1:h + 1, 1:w + 1] = np.asarray(mask, dtype=np.uint8)

    while True:
        changed = False
        for sub in range(4):
            a = sub >> 1
            b = sub & 1
            for y in range(1 + a, h + 1, 2):
                for x in range(1 + b, w + 1, 2):
                    if padded[y, x] == 0:
                        continue
                    code = 0
                    for i in range(8):
                        if padded[y + _DY[i], x + _DX[i]]:
                            code |= 1 << i
                    if deletable[code]:
                        padded[y, x] = 0
                        changed = True
        if not changed:
            break
    return padded[1:h + 1, 1:w + 1].astype(bool)


cdef void _edt_row(double* f, double* out, cnp.intp_t* v, double* z,
                   Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t q, k = 0
    cdef double s, fq
    v[0] = 0
    z[0] = -INFINITY
    z[1] = INFINITY
    for q in range(1, n):
        fq = f[q] + q * q
        s = (fq - (f[v[k]] + v[k] * v[k])) / (2.0 * (q - v[k]))
        while s <= z[k]:
            k -= 1
            s = (fq - (f[v[k]] + v[k] * v[k])) / (2.0 * (q - v[k]))
        k += 1
        v[k] = q
        z[k] = s
        z[k + 1] = INFINITY
    k = 0
    for q in range(n):
        while z[k + 1] < q:
            k += 1
        s = q - v[k]
        out[q] = s * s + f[v[k]]


def edt(mask):
    """Exact Euclidean distance to the nearest background pixel.

    Two-pass: per-column nearest-background sweep, then a per-row lower
    envelope over squared distances. 0 on background; +inf when the mask
    has no background at all.
    """
    fg = np.asarray(mask, dtype=bool)
    cdef Py_ssize_t h = fg.shape[0]
    cdef Py_ssize_t w = fg.shape[1]
    if not fg.any():
        return np.zeros((h, w), dtype=np.float64)
    if fg.all():
        return np.full((h, w), np.inf, dtype=np.float64)

    cdef cnp.ndarray[cnp.int64_t, ndim=2] g
    cdef cnp.ndarray[cnp.float64_t, ndim=2] f
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out
    cdef cnp.ndarray[cnp.float64_t, ndim=1] frow = np.empty(w, dtype=np.float64)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] v = np.empty(w, dtype=np.intp)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] z = np.empty(w + 1, dtype=np.float64)
    cdef Py_ssize_t y, x
    cdef bint any_fg

    g = np.where(fg, h + w, 0).astype(np.int64)
    for y in range(1, h):
        for x in range(w):
            if g[y, x] > g[y - 1, x] + 1:
                g[y, x] = g[y - 1, x] + 1
    for y in range(h - 2, -1, -1):
        for x in range(w):
            if g[y, x] > g[y + 1, x] + 1:
                g[y, x] = g[y + 1, x] + 1

    out = np.empty((h, w), dtype=np.float64)
    for y in range(h):
        any_fg = False
        for x in range(w):
            frow[x] = <double>(g[y, x]) * g[y, x]
            if frow[x] != 0.0:
                any_fg = True
        if not any_fg:
            for x in range(w):
                out[y, x] = 0.0
            continue
        _edt_row(&frow[0], &out[y, 0], &v[0], &z[0], w)
    return np.sqrt(out)


def label(mask, int connectivity=8):
    """Flood-fill component labeling; labels dense from 1 in row-major
    first-encounter order, 0 for background."""
    fg = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] a = fg
    cdef Py_ssize_t h = a.shape[0]
    cdef Py_ssize_t w = a.shape[1]
    cdef cnp.ndarray[cnp.int32_t, ndim=2] labels = np.zeros((h, w), dtype=np.int32)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] qy = np.empty(h * w, dtype=np.intp)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] qx = np.empty(h * w, dtype=np.intp)
    cdef Py_ssize_t y0, x0, y, x, ny, nx, head, tail
    cdef int count = 0, i, n_off
    cdef int[8] dy
    cdef int[8] dx

    if connectivity == 8:
        n_off = 8
        for i in range(8):
            dy[i] = _DY[i]
            dx[i] = _DX[i]
    else:
        n_off = 4
        dy[0] = -1; dx[0] = 0
        dy[1] = 0;  dx[1] = -1
        dy[2] = 0;  dx[2] = 1
        dy[3] = 1;  dx[3] = 0

    for y0 in range(h):
        for x0 in range(w):
            if a[y0, x0] == 0 or labels[y0, x0] != 0:
                continue
            count += 1
            head = 0
            tail = 0
            qy[tail] = y0
            qx[tail] = x0
            tail += 1
            labels[y0, x0] = count
            while head < tail:
                y = qy[head]
                x = qx[head]
                head += 1
                for i in range(n_off):
                    ny = y + dy[i]
                    nx = x + dx[i]
                    if 0 <= ny < h and 0 <= nx < w and a[ny, nx] != 0 and labels[ny, nx] == 0:
                        labels[ny, nx] = count
                        qy[tail] = ny
                        qx[tail] = nx
                        tail += 1
    return labels, count
