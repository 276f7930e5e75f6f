"""Exact fixed-radius and nearest-neighbour queries, and sampling density."""
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import DegenerateSamplingError

# candidate radius inflation before the exact distance filter
_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class NeighborIndex:
    """Immutable k-d tree over a cloud's points.

    Radius queries are exact closed-ball membership: candidates from the tree
    are re-filtered with ``sum((p - c)**2) <= radius**2``.
    """

    tree: cKDTree
    points: np.ndarray
    n: int
    bbox: tuple

    def radius_query(self, center, radius):
        return radius_query(self, center, radius)

    def radius_neighborhoods(self, radius, centers=None):
        """Closed-ball neighbourhoods of many indexed points, as CSR arrays.

        Returns ``(indices, offsets)`` where the neighbours of the k-th center
        are ``indices[offsets[k]:offsets[k + 1]]``, ascending, self included.
        """
        if centers is None:
            centers = np.arange(self.n)
        centers = np.asarray(centers, dtype=np.int64)
        lists = self.tree.query_ball_point(
            self.points[centers], radius * (1.0 + _SLACK) + _SLACK * radius)
        counts = np.fromiter((len(c) for c in lists), dtype=np.int64, count=len(centers))
        flat = np.fromiter((j for c in lists for j in c), dtype=np.int64, count=int(counts.sum()))
        owner = np.repeat(centers, counts)
        d = self.points[flat] - self.points[owner]
        keep = (d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1] + d[:, 2] * d[:, 2]) <= radius * radius
        flat, owner = flat[keep], np.repeat(np.arange(len(centers)), counts)[keep]
        order = np.lexsort((flat, owner))
        flat, owner = flat[order], owner[order]
        offsets = np.zeros(len(centers) + 1, dtype=np.int64)
        np.cumsum(np.bincount(owner, minlength=len(centers)), out=offsets[1:])
        return flat, offsets


@dataclass(frozen=True)
class SamplingEstimate:
    epsilon: float
    per_point_nn: np.ndarray


def build_index(cloud):
    pts = cloud.points
    return NeighborIndex(cKDTree(pts), pts, pts.shape[0],
                         (tuple(pts.min(axis=0)), tuple(pts.max(axis=0))))


def radius_query(index, center, radius):
    """Indices j with ``||p_j - center|| <= radius``, sorted ascending."""
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius}")
    c = np.asarray(center, dtype=np.float64)
    cand = np.asarray(index.tree.query_ball_point(c, radius * (1.0 + _SLACK) + _SLACK * radius),
                      dtype=np.int64)
    if cand.size == 0:
        return cand
    d = index.points[cand] - c
    keep = (d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1] + d[:, 2] * d[:, 2]) <= radius * radius
    return np.sort(cand[keep])


def knn_query(index, center, k):
    """The ``k`` nearest indexed points to ``center`` as (distances, indices)."""
    k = min(int(k), index.n)
    d, i = index.tree.query(np.asarray(center, dtype=np.float64), k=k)
    return np.atleast_1d(d), np.atleast_1d(i).astype(np.int64)


def estimate_epsilon(index, cloud=None):
    """Mean distance from each point to its nearest *distinct* neighbour.

    Coincident copies of a point are skipped so duplicates do not drive the
    estimate to zero; a cloud whose points all coincide raises
    :class:`DegenerateSamplingError`.
    """
    pts = index.points if cloud is None else cloud.points
    n = pts.shape[0]
    if n < 2:
        raise DegenerateSamplingError("need at least two points to estimate sampling density")
    k = 2
    while True:
        d, _ = index.tree.query(pts, k=min(k, n))
        d = d.reshape(n, -1)
        pos = np.where(d > 0, d, np.inf).min(axis=1)
        unresolved = ~np.isfinite(pos)
        if not unresolved.any() or k >= n:
            break
        k = min(2 * k, n)
    if unresolved.all():
        raise DegenerateSamplingError("all points coincide; sampling density is undefined")
    if unresolved.any():
        raise DegenerateSamplingError(
            "some points have no distinct neighbour", int(np.argmax(unresolved)))
    return SamplingEstimate(float(pos.mean()), pos)
