"""Tangent-plane PCA and projected Voronoi cell areas.

Each point's area element is the area of its cell in the 2D Voronoi diagram
of its neighbourhood projected onto its own estimated tangent plane. Cells of
a finite neighbourhood can be unbounded, so every cell is intersected with a
disk about the point (radius ``clip_scale * delta``, default ``delta / 2``).
"""
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import (
    DegenerateNeighborhoodError,
    DuplicatePointError,
    GeometryError,
    InsufficientNeighborsError,
)

COLLINEAR_TOL = 1e-12
DUPLICATE_TOL = 1e-12
JITTER = 1e-9


@dataclass(frozen=True)
class TangentFrame:
    origin: np.ndarray
    basis_u: np.ndarray
    basis_v: np.ndarray
    normal: np.ndarray

    def project(self, pts):
        d = np.atleast_2d(pts) - self.origin
        return np.column_stack((d @ self.basis_u, d @ self.basis_v))


@dataclass(frozen=True, eq=False)
class AreaWeights:
    areas: np.ndarray
    normals: np.ndarray | None = None

    def __len__(self):
        return self.areas.shape[0]


def _pca_frames(points, centers, nb_idx, nb_off):
    """Batched PCA of CSR neighbourhoods; returns (u, v, normal) stacks."""
    counts = np.diff(nb_off)
    few = np.flatnonzero(counts < 3)
    if few.size:
        i = int(centers[few[0]])
        raise InsufficientNeighborsError(
            f"tangent-plane neighbourhood holds {counts[few[0]]} points, need >= 3", i)
    owner = np.repeat(np.arange(len(centers)), counts)
    # offsets relative to the center keep the second moments well conditioned
    y = points[nb_idx] - points[centers][owner]
    starts = nb_off[:-1]
    mean = np.add.reduceat(y, starts, axis=0) / counts[:, None]
    outer = np.add.reduceat(y[:, :, None] * y[:, None, :], starts, axis=0)
    cov = outer / counts[:, None, None] - mean[:, :, None] * mean[:, None, :]
    evals, evecs = np.linalg.eigh(cov)
    top = evals[:, 2]
    flat = (top <= 0) | (evals[:, 1] < COLLINEAR_TOL * top)
    if flat.any():
        k = int(np.argmax(flat))
        raise DegenerateNeighborhoodError(
            "neighbourhood is collinear or coincident; tangent plane undefined", int(centers[k]))
    u = evecs[:, :, 2]
    v = evecs[:, :, 1]
    return u, v, np.cross(u, v)


def estimate_tangent_plane(cloud, index, i, r):
    """PCA tangent frame of point ``i`` from its closed ``r``-neighbourhood.

    The covariance is taken about the neighbourhood mean. ``basis_u`` and
    ``basis_v`` are the two leading principal directions; ``normal`` is
    ``basis_u x basis_v``.
    """
    nb_idx, nb_off = index.radius_neighborhoods(r, [i])
    u, v, nrm = _pca_frames(cloud.points, np.array([i]), nb_idx, nb_off)
    return TangentFrame(cloud.points[i].copy(), u[0], v[0], nrm[0])


def _project_sites(points, centers, u, v, nb_idx, nb_off, delta, seed):
    """2D coordinates of each center's delta-neighbours (self excluded)."""
    counts = np.diff(nb_off)
    owner = np.repeat(np.arange(len(centers)), counts)
    not_self = nb_idx != centers[owner]
    sizes = np.bincount(owner[not_self], minlength=len(centers))
    short = np.flatnonzero(sizes + 1 < 4)
    if short.size:
        k = short[0]
        raise InsufficientNeighborsError(
            f"Voronoi neighbourhood holds {sizes[k] + 1} points, need >= 4", int(centers[k]))
    nb_idx, owner = nb_idx[not_self], owner[not_self]
    d = points[nb_idx] - points[centers][owner]
    xy = np.column_stack((np.einsum("ij,ij->i", d, u[owner]),
                          np.einsum("ij,ij->i", d, v[owner])))
    scale = np.asarray(delta, dtype=np.float64) * np.ones(len(centers))
    dup = np.hypot(xy[:, 0], xy[:, 1]) < DUPLICATE_TOL * scale[owner]
    if dup.any():
        for k in np.unique(owner[dup]):
            rows = np.flatnonzero(dup & (owner == k))
            rng = np.random.default_rng([int(seed), int(centers[k])])
            theta = rng.uniform(0.0, 2.0 * np.pi, size=rows.size)
            xy[rows] += JITTER * scale[k] * np.column_stack((np.cos(theta), np.sin(theta)))
        still = np.hypot(xy[:, 0], xy[:, 1]) < DUPLICATE_TOL * scale[owner]
        if still.any():
            k = int(owner[np.argmax(still)])
            raise GeometryError("projected neighbour coincides with the point after jitter",
                                int(centers[k]))
    offsets = np.zeros(len(centers) + 1, dtype=np.int64)
    np.cumsum(sizes, out=offsets[1:])
    return xy, offsets


def voronoi_cell_area(cloud, index, i, frame, delta, clip_scale=0.5, seed=0):
    """Area of point ``i``'s cell in the projected Voronoi diagram.

    The neighbours within ``delta`` are projected into ``frame``; the cell is
    clipped to the disk of radius ``clip_scale * delta`` about the point.
    Projected neighbours falling on the point itself are displaced by
    ``1e-9 * delta`` in a seeded random direction.
    """
    nb_idx, nb_off = index.radius_neighborhoods(delta, [i])
    centers = np.array([i])
    xy, offsets = _project_sites(cloud.points, centers, frame.basis_u[None], frame.basis_v[None],
                                 nb_idx, nb_off, delta, seed)
    area = kernels.clipped_cell_areas(xy, offsets, np.array([clip_scale * delta]))[0]
    if not (np.isfinite(area) and area > 0):
        raise GeometryError(f"non-positive Voronoi cell area {area}", i)
    return float(area)


def all_area_weights(cloud, index, r, delta, clip_scale=0.5, seed=0):
    """Per-point area elements, each computed in the point's own tangent frame.

    Raises :class:`DuplicatePointError` when two points coincide exactly and
    other :class:`GeometryError` subclasses with the failing index otherwise.
    """
    pts = cloud.points
    n = pts.shape[0]
    centers = np.arange(n)
    dup_pairs = index.tree.query_pairs(0.0, output_type="ndarray")
    if len(dup_pairs):
        a, b = sorted(int(x) for x in dup_pairs[np.lexsort(dup_pairs.T[::-1])][0])
        raise DuplicatePointError(f"coincides with point {a}", b)
    nb_idx, nb_off = index.radius_neighborhoods(r)
    u, v, nrm = _pca_frames(pts, centers, nb_idx, nb_off)
    nb_idx, nb_off = index.radius_neighborhoods(delta)
    xy, offsets = _project_sites(pts, centers, u, v, nb_idx, nb_off, delta, seed)
    areas = kernels.clipped_cell_areas(xy, offsets, np.full(n, clip_scale * delta))
    bad = ~(np.isfinite(areas) & (areas > 0))
    if bad.any():
        k = int(np.argmax(bad))
        raise GeometryError(f"non-positive Voronoi cell area {areas[k]}", k)
    return AreaWeights(areas, nrm)
