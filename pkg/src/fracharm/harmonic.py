"""Manifold harmonic basis and the (integer-order) harmonic transform."""
from dataclasses import dataclass
import hashlib

import numpy as np
from scipy import linalg

from .errors import ConfigError, EigenSolverError, GeometryError, OperatorMismatchError

DENSE_LIMIT = 4000


def content_id(*arrays):
    h = hashlib.sha256()
    for a in arrays:
        a = np.ascontiguousarray(a)
        h.update(str(a.shape).encode())
        h.update(a.tobytes())
    return h.hexdigest()[:16]


@dataclass(frozen=True, eq=False)
class HarmonicBasis:
    """Eigenpairs of ``Q H = -lambda B H``.

    ``lambdas`` are ascending and nonnegative, ``H`` has B-orthonormal columns
    (``H.T @ diag(b) @ H = I``) and each column's largest-magnitude entry is
    positive.
    """

    lambdas: np.ndarray
    H: np.ndarray
    b: np.ndarray
    basis_id: str

    @property
    def n(self):
        return self.b.shape[0]


@dataclass(frozen=True, eq=False)
class SpectralSignal:
    """Complex coefficients in the fractional domain of a given order.

    ``coeffs`` has shape (N,) for a single channel or (N, C).
    """

    coeffs: np.ndarray
    order: float
    basis_id: str

    @property
    def n(self):
        return self.coeffs.shape[0]


def _as_channels(f, n):
    f = np.asarray(f)
    if f.ndim not in (1, 2) or f.shape[0] != n:
        raise ValueError(f"signal of shape {f.shape} does not match {n} points")
    return f


def solve_harmonic_basis(pair, dense_limit=DENSE_LIMIT):
    """Dense eigendecomposition of the symmetrized operator.

    Solves ``S v = mu v`` for ``S = B^{-1/2} Q B^{-1/2}`` and maps back with
    ``H = B^{-1/2} v``; ``lambdas = -mu``.
    """
    b = np.asarray(pair.b, dtype=np.float64)
    n = b.shape[0]
    if n > dense_limit:
        raise ConfigError(
            f"{n} points exceed the dense eigensolve limit {dense_limit}; downsample first")
    if not np.all(b > 0):
        k = int(np.argmax(~(b > 0)))
        raise GeometryError(f"mass entry {b[k]} is not positive", k)
    s = 1.0 / np.sqrt(b)
    S = pair.Q.toarray()
    S *= s[:, None]
    S *= s[None, :]
    # symmetric by construction; average to strip any rounding asymmetry
    S = -0.5 * (S + S.T)
    try:
        mu, V = linalg.eigh(S, driver="evd")
    except linalg.LinAlgError as exc:
        raise EigenSolverError(f"symmetric eigensolver failed: {exc}") from exc
    top = max(abs(mu[-1]), np.finfo(float).tiny)
    if mu[0] < -1e-8 * top:
        raise EigenSolverError(
            f"operator is not negative semidefinite: eigenvalue {-mu[0]:.3e} > 0")
    lambdas = np.clip(mu, 0.0, None)
    H = V * s[:, None]
    # B-normalize columns explicitly; V is orthonormal up to rounding
    H /= np.sqrt(np.einsum("ij,i,ij->j", H, b, H))[None, :]
    flip = H[np.argmax(np.abs(H), axis=0), np.arange(n)] < 0
    H[:, flip] *= -1.0
    for a in (lambdas, H):
        a.setflags(write=False)
    b = b.copy()
    b.setflags(write=False)
    return HarmonicBasis(lambdas, H, b, content_id(lambdas, H))


def pmht_forward(basis, f):
    """Harmonic coefficients ``H^T B f`` (order-1 spectral signal)."""
    f = _as_channels(f, basis.n)
    bf = basis.b * f if f.ndim == 1 else basis.b[:, None] * f
    return SpectralSignal((basis.H.T @ bf).astype(np.complex128), 1.0, basis.basis_id)


def pmht_inverse(basis, sig):
    """Synthesis ``H @ coeffs``; returns the real part."""
    if sig.basis_id != basis.basis_id:
        raise OperatorMismatchError("spectral signal was computed against a different basis")
    if sig.order != 1:
        raise OperatorMismatchError(f"expected an order-1 signal, got order {sig.order}")
    return basis.H @ np.real(sig.coeffs)


def manifold_fourier_matrix(basis, check=True):
    """Dense ``F_M = H^T B``; its inverse is ``H``."""
    F = basis.H.T * basis.b[None, :]
    if check:
        err = np.abs(F @ basis.H - np.eye(basis.n)).max()
        if err > 1e-8:
            raise EigenSolverError(f"F_M @ H deviates from identity by {err:.3e}")
    return F
