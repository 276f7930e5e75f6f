"""Heat-kernel Laplace-Beltrami operator on a point cloud.

The operator is ``L = B^{-1} Q`` with

* ``q_ij = a_i a_j / (4 pi t^2) * exp(-|p_i - p_j|^2 / (4 t))`` for ``i != j``
  and ``|p_i - p_j| <= delta`` (exactly zero beyond ``delta``),
* ``q_ii = -sum_{j != i} q_ij``,
* ``b_ii = a_i``,

where ``a_i`` is the area element of point ``i``. The prefactor
``1 / (4 pi t^2)`` makes ``(L f)_i`` approximate the Laplacian of ``f`` on a
2D manifold.
"""
from dataclasses import dataclass

import numpy as np
from scipy import io as spio
from scipy import sparse

from .errors import ConfigError, GeometryError

_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class LboPair:
    """Stiffness matrix ``Q`` (sparse CSR, symmetric) and mass diagonal ``b``."""

    Q: sparse.csr_matrix
    b: np.ndarray
    t: float
    delta: float

    @property
    def n(self):
        return self.b.shape[0]

    @property
    def B(self):
        return sparse.diags(self.b, format="csr")


def default_t(epsilon, exponent_margin=0.5):
    """Heat parameter ``epsilon ** (1/2 + exponent_margin)``."""
    if not epsilon > 0:
        raise ConfigError(f"epsilon must be positive, got {epsilon}")
    return float(epsilon) ** (0.5 + float(exponent_margin))


def assemble_lbo(cloud, index, weights, t, delta):
    if not t > 0:
        raise ConfigError(f"heat parameter t must be positive, got {t}")
    if not delta > 0:
        raise ConfigError(f"delta must be positive, got {delta}")
    areas = np.asarray(getattr(weights, "areas", weights), dtype=np.float64)
    n = len(cloud)
    if areas.shape != (n,):
        raise ValueError(f"expected {n} area weights, got {areas.shape}")
    bad = ~(np.isfinite(areas) & (areas > 0))
    if bad.any():
        k = int(np.argmax(bad))
        raise GeometryError(f"area weight {areas[k]} is not positive and finite", k)

    pts = cloud.points
    pairs = index.tree.query_pairs(delta * (1.0 + _SLACK), output_type="ndarray")
    if len(pairs):
        i, j = pairs[:, 0].astype(np.int64), pairs[:, 1].astype(np.int64)
        d = pts[i] - pts[j]
        d2 = d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1] + d[:, 2] * d[:, 2]
        keep = d2 <= delta * delta
        i, j, d2 = i[keep], j[keep], d2[keep]
    else:
        i = j = np.empty(0, dtype=np.int64)
        d2 = np.empty(0)
    # one value per unordered pair, mirrored, so Q is exactly symmetric
    w = areas[i] * areas[j] / (4.0 * np.pi * t * t) * np.exp(-d2 / (4.0 * t))
    rows = np.concatenate((i, j))
    cols = np.concatenate((j, i))
    vals = np.concatenate((w, w))
    off = sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))
    diag = -np.asarray(off.sum(axis=1)).ravel()
    Q = (off + sparse.diags(diag)).tocsr()
    Q.sort_indices()
    b = areas.copy()
    b.setflags(write=False)
    return LboPair(Q, b, float(t), float(delta))


def apply_lbo(pair, f):
    """``B^{-1} Q f`` for a vector or an (N, C) stack of channels."""
    f = np.asarray(f, dtype=np.float64)
    if f.shape[0] != pair.n:
        raise ValueError(f"signal length {f.shape[0]} does not match operator size {pair.n}")
    out = pair.Q @ f
    return out / (pair.b if f.ndim == 1 else pair.b[:, None])


def dump_matrix_market(pair, q_path, b_path):
    spio.mmwrite(str(q_path), pair.Q, comment="stiffness matrix Q", symmetry="symmetric")
    spio.mmwrite(str(b_path), sparse.diags(pair.b, format="coo"), comment="mass matrix B")
