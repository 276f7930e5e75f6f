"""Pure-Python implementations of the hot kernels.

These mirror ``_kernels.pyx`` operation for operation so both backends agree
to rounding. Used when the compiled extension is unavailable or when
``FRACHARM_PURE_PYTHON=1`` is set.
"""
import math

import numpy as np


def farthest_point_sampling(points, start, k):
    """Greedy farthest-point ordering of ``k`` indices beginning at ``start``.

    Ties resolve to the lowest index.
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    n = points.shape[0]
    out = np.empty(k, dtype=np.int64)
    x, y, z = points[:, 0], points[:, 1], points[:, 2]
    mind = np.full(n, np.inf)
    cur = int(start)
    for s in range(k):
        out[s] = cur
        dx = x - x[cur]
        dy = y - y[cur]
        dz = z - z[cur]
        np.minimum(mind, dx * dx + dy * dy + dz * dz, out=mind)
        cur = int(np.argmax(mind))
    return out


def _clip(poly, nx, ny, c):
    # keep the side nx*x + ny*y <= c of a convex polygon
    out = []
    m = len(poly)
    if m == 0:
        return out
    px, py = poly[-1]
    pv = nx * px + ny * py - c
    for qx, qy in poly:
        qv = nx * qx + ny * qy - c
        if qv <= 0.0:
            if pv > 0.0:
                s = pv / (pv - qv)
                out.append((px + s * (qx - px), py + s * (qy - py)))
            out.append((qx, qy))
        elif pv <= 0.0:
            s = pv / (pv - qv)
            out.append((px + s * (qx - px), py + s * (qy - py)))
        px, py, pv = qx, qy, qv
    return out


def _sector(ax, ay, bx, by, r2):
    return 0.5 * r2 * math.atan2(ax * by - ay * bx, ax * bx + ay * by)


def _edge_disk_area(ax, ay, bx, by, r):
    """Signed area of triangle (origin, a, b) intersected with the disk."""
    r2 = r * r
    a2 = ax * ax + ay * ay
    b2 = bx * bx + by * by
    a_in = a2 <= r2
    b_in = b2 <= r2
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
    sq = math.sqrt(disc)
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
    p1x = ax + s1 * dx
    p1y = ay + s1 * dy
    p2x = ax + s2 * dx
    p2y = ay + s2 * dy
    return (_sector(ax, ay, p1x, p1y, r2)
            + 0.5 * (p1x * p2y - p1y * p2x)
            + _sector(p2x, p2y, bx, by, r2))


def cell_area(sites, radius):
    """Area of the Voronoi cell of the origin among ``sites`` within a disk.

    ``sites`` is an (m, 2) array of other generators relative to the cell's
    own generator. The result is the area of the cell intersected with the
    disk of ``radius`` about the origin.
    """
    r = float(radius)
    poly = [(-r, -r), (r, -r), (r, r), (-r, r)]
    lim = 4.0 * r * r
    for qx, qy in np.asarray(sites, dtype=np.float64).tolist():
        q2 = qx * qx + qy * qy
        if q2 >= lim:
            continue
        poly = _clip(poly, qx, qy, 0.5 * q2)
        if not poly:
            return 0.0
    area = 0.0
    m = len(poly)
    for k in range(m):
        ax, ay = poly[k]
        bx, by = poly[(k + 1) % m]
        area += _edge_disk_area(ax, ay, bx, by, r)
    return area


def clipped_cell_areas(sites, offsets, radii):
    """Batched :func:`cell_area` over a CSR layout of site lists."""
    sites = np.ascontiguousarray(sites, dtype=np.float64).reshape(-1, 2)
    offsets = np.asarray(offsets, dtype=np.int64)
    radii = np.asarray(radii, dtype=np.float64)
    n = radii.shape[0]
    out = np.empty(n)
    for i in range(n):
        out[i] = cell_area(sites[offsets[i]:offsets[i + 1]], radii[i])
    return out
