"""Fractional powers of the manifold Fourier matrix.

``F_M = P diag(J) P^{-1}`` is diagonalized once; the order-``a`` matrix is
``P diag(J**a) P^{-1}`` with ``J**a = exp(a * log J)`` on the principal branch.
The logarithm of each eigenvalue is computed once and cached, so
``F^(a) F^(b) = F^(a+b)`` holds up to rounding for every real ``a``, ``b``.
"""
from dataclasses import dataclass
import warnings

import numpy as np
from scipy import linalg

from .errors import (
    BranchCutWarning,
    DefectiveOperatorError,
    EigenSolverError,
    ImaginaryResidueWarning,
    OperatorMismatchError,
)
from .harmonic import SpectralSignal, _as_channels, content_id, manifold_fourier_matrix

COND_LIMIT = 1e10
RECON_TOL = 1e-7
RESIDUE_TOL = 1e-6
_CUT_MARGIN = 1e-9


@dataclass(frozen=True, eq=False)
class FractionalOperator:
    P: np.ndarray
    J: np.ndarray
    P_inv: np.ndarray
    cond_P: float
    log_J: np.ndarray
    operator_id: str
    basis_id: str | None = None

    @property
    def n(self):
        return self.J.shape[0]

    @property
    def on_branch_cut(self):
        """Eigenvalues whose argument is within 1e-9 of +-pi."""
        return np.abs(self.log_J.imag) > np.pi - _CUT_MARGIN

    def powers(self, a):
        return np.exp(a * self.log_J)


def decompose_fourier_matrix(F_M, cond_limit=COND_LIMIT, basis_id=None):
    """Eigendecompose the real nonsymmetric ``F_M``.

    Raises
    ------
    DefectiveOperatorError
        The eigenvector matrix is too ill-conditioned (``cond_P >
        cond_limit``), i.e. ``F_M`` is defective or nearly so. Perturb the
        cloud slightly or reduce N.
    EigenSolverError
        The eigensolver failed or ``P J P^{-1}`` does not reproduce ``F_M``.
    """
    F_M = np.asarray(F_M, dtype=np.float64)
    try:
        J, P = linalg.eig(F_M)
    except linalg.LinAlgError as exc:
        raise EigenSolverError(f"nonsymmetric eigensolver failed: {exc}") from exc
    if np.any(J == 0):
        raise EigenSolverError("manifold Fourier matrix is singular")
    cond = float(np.linalg.cond(P))
    if not np.isfinite(cond) or cond > cond_limit:
        raise DefectiveOperatorError(
            f"eigenvector matrix condition {cond:.3e} exceeds {cond_limit:.1e}; the Fourier "
            "matrix is (near-)defective. Perturb the points slightly or use fewer points.")
    P_inv = linalg.inv(P)
    scale = np.abs(F_M).max()
    err = np.abs((P * J[None, :]) @ P_inv - F_M).max()
    if err > RECON_TOL * scale:
        raise EigenSolverError(
            f"eigendecomposition reconstructs F_M with error {err:.3e} (scale {scale:.3e})")
    log_J = np.log(J.astype(np.complex128))
    for a in (P, J, P_inv, log_J):
        a.setflags(write=False)
    return FractionalOperator(P, J, P_inv, cond, log_J, content_id(F_M), basis_id)


def operator_from_basis(basis, cond_limit=COND_LIMIT):
    return decompose_fourier_matrix(manifold_fourier_matrix(basis), cond_limit, basis.basis_id)


def _warn_cut(opr, a):
    if float(a).is_integer():
        return
    if opr.on_branch_cut.any():
        warnings.warn(
            f"{int(opr.on_branch_cut.sum())} eigenvalue(s) lie on the negative real axis; "
            f"order {a} uses the principal branch", BranchCutWarning, stacklevel=3)


def fractional_matrix(opr, a):
    """Dense ``P diag(J**a) P^{-1}`` (complex)."""
    _warn_cut(opr, a)
    return (opr.P * opr.powers(a)[None, :]) @ opr.P_inv


def _apply(opr, x, a):
    # P diag(J^a) P^{-1} x without forming the N x N matrix
    y = opr.P_inv @ x
    w = opr.powers(a)
    y = y * (w if y.ndim == 1 else w[:, None])
    return opr.P @ y


def pmfht_forward(opr, f, a):
    """Order-``a`` coefficients ``F_M^(a) f``, one column per channel."""
    f = _as_channels(f, opr.n)
    _warn_cut(opr, a)
    return SpectralSignal(_apply(opr, f.astype(np.complex128), float(a)), float(a),
                          opr.operator_id)


def pmfht_inverse(opr, sig, return_complex=False):
    """Apply ``F_M^(-a)`` to an order-``a`` signal.

    Returns the real part. If the imaginary part exceeds ``1e-6`` of the
    result's norm an :class:`ImaginaryResidueWarning` is issued; pass
    ``return_complex=True`` to get the full complex result instead.
    """
    if sig.basis_id != opr.operator_id:
        raise OperatorMismatchError("spectral signal was computed against a different operator")
    _warn_cut(opr, sig.order)
    out = _apply(opr, np.asarray(sig.coeffs, dtype=np.complex128), -sig.order)
    if return_complex:
        return out
    res = imaginary_residue(out)
    if res > RESIDUE_TOL:
        warnings.warn(f"inverse transform left relative imaginary residue {res:.3e}",
                      ImaginaryResidueWarning, stacklevel=2)
    return out.real


def imaginary_residue(x):
    """``||imag(x)|| / ||x||`` (0 for a zero signal)."""
    norm = np.linalg.norm(x)
    return float(np.linalg.norm(np.imag(x)) / norm) if norm > 0 else 0.0
