# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; same arithmetic as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport atan2, sqrt, INFINITY

cnp.import_array()


def farthest_point_sampling(points, Py_ssize_t start, Py_ssize_t k):
    cdef const double[:, ::1] p = np.ascontiguousarray(points, dtype=np.float64)
    cdef Py_ssize_t n = p.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.empty(k, dtype=np.int64)
    cdef double[::1] mind = np.full(n, INFINITY)
    cdef Py_ssize_t s, j, cur = start, best
    cdef double cx, cy, cz, dx, dy, dz, d, bestd
    for s in range(k):
        out[s] = cur
        cx = p[cur, 0]
        cy = p[cur, 1]
        cz = p[cur, 2]
        best = 0
        bestd = -1.0
        for j in range(n):
            dx = p[j, 0] - cx
            dy = p[j, 1] - cy
            dz = p[j, 2] - cz
            d = dx * dx + dy * dy + dz * dz
            if d < mind[j]:
                mind[j] = d
            if mind[j] > bestd:
                bestd = mind[j]
                best = j
        cur = best
    return out


cdef inline double _sector(double ax, double ay, double bx, double by, double r2) nogil:
    return 0.5 * r2 * atan2(ax * by - ay * bx, ax * bx + ay * by)


cdef double _edge_disk_area(double ax, double ay, double bx, double by, double r) nogil:
    cdef double r2 = r * r
    cdef double a2 = ax * ax + ay * ay
    cdef double b2 = bx * bx + by * by
    cdef bint a_in = a2 <= r2
    cdef bint b_in = b2 <= r2
    cdef double dx, dy, qa, qb, qc, disc, sq, s1, s2, px, py, p2x, p2y
    if a_in and b_in:
        return 0.5 * (ax * by - ay * bx)
    dx = bx - ax
    dy = by - ay
    qa = dx * dx + dy * dy
    if qa == 0.0:
        return 0.0
    qb = ax * dx + ay * dy
    qc = a2 - r2
    disc = qb * qb - qa * qc
    if disc <= 0.0:
        return _sector(ax, ay, bx, by, r2)
    sq = sqrt(disc)
    s1 = (-qb - sq) / qa
    s2 = (-qb + sq) / qa
    if a_in:
        px = ax + s2 * dx
        py = ay + s2 * dy
        return 0.5 * (ax * py - ay * px) + _sector(px, py, bx, by, r2)
    if b_in:
        px = ax + s1 * dx
        py = ay + s1 * dy
        return _sector(ax, ay, px, py, r2) + 0.5 * (px * by - py * bx)
    if s1 >= 1.0 or s2 <= 0.0 or s1 <= 0.0 or s2 >= 1.0:
        return _sector(ax, ay, bx, by, r2)
    px = ax + s1 * dx
    py = ay + s1 * dy
    p2x = ax + s2 * dx
    p2y = ay + s2 * dy
    return (_sector(ax, ay, px, py, r2)
            + 0.5 * (px * p2y - py * p2x)
            + _sector(p2x, p2y, bx, by, r2))


cdef Py_ssize_t _clip(double* src, Py_ssize_t m, double* dst,
                      double nx, double ny, double c) nogil:
    cdef Py_ssize_t k, o = 0
    cdef double px, py, pv, qx, qy, qv, s
    if m == 0:
        return 0
    px = src[2 * (m - 1)]
    py = src[2 * (m - 1) + 1]
    pv = nx * px + ny * py - c
    for k in range(m):
        qx = src[2 * k]
        qy = src[2 * k + 1]
        qv = nx * qx + ny * qy - c
        if qv <= 0.0:
            if pv > 0.0:
                s = pv / (pv - qv)
                dst[2 * o] = px + s * (qx - px)
                dst[2 * o + 1] = py + s * (qy - py)
                o += 1
            dst[2 * o] = qx
            dst[2 * o + 1] = qy
            o += 1
        elif pv <= 0.0:
            s = pv / (pv - qv)
            dst[2 * o] = px + s * (qx - px)
            dst[2 * o + 1] = py + s * (qy - py)
            o += 1
        px = qx
        py = qy
        pv = qv
    return o


def clipped_cell_areas(sites, offsets, radii):
    cdef const double[:, ::1] q = np.ascontiguousarray(sites, dtype=np.float64).reshape(-1, 2)
    cdef const cnp.int64_t[::1] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef const double[::1] rad = np.ascontiguousarray(radii, dtype=np.float64)
    cdef Py_ssize_t n = rad.shape[0]
    cdef Py_ssize_t i, j, m, k, maxm = 0
    for i in range(n):
        if off[i + 1] - off[i] > maxm:
            maxm = off[i + 1] - off[i]
    # a convex polygon clipped by h half-planes has at most 4 + h vertices
    cdef double[::1] buf_a = np.empty(2 * (maxm + 8))
    cdef double[::1] buf_b = np.empty(2 * (maxm + 8))
    cdef double* cur
    cdef double* nxt
    cdef double* tmp
    cdef double r, lim, qx, qy, q2, area
    out = np.empty(n)
    cdef double[::1] res = out
    with nogil:
        for i in range(n):
            r = rad[i]
            cur = &buf_a[0]
            nxt = &buf_b[0]
            cur[0] = -r; cur[1] = -r
            cur[2] = r; cur[3] = -r
            cur[4] = r; cur[5] = r
            cur[6] = -r; cur[7] = r
            m = 4
            lim = 4.0 * r * r
            for j in range(off[i], off[i + 1]):
                qx = q[j, 0]
                qy = q[j, 1]
                q2 = qx * qx + qy * qy
                if q2 >= lim:
                    continue
                m = _clip(cur, m, nxt, qx, qy, 0.5 * q2)
                tmp = cur
                cur = nxt
                nxt = tmp
                if m == 0:
                    break
            area = 0.0
            for k in range(m):
                area += _edge_disk_area(cur[2 * k], cur[2 * k + 1],
                                        cur[2 * ((k + 1) % m)],
                                        cur[2 * ((k + 1) % m) + 1], r)
            res[i] = area
    return out
