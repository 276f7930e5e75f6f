"""Mode-mask filtering in a fractional spectral domain."""
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, OperatorMismatchError
from .fractional import imaginary_residue, pmfht_forward, pmfht_inverse
from .harmonic import _as_channels

KINDS = ("lowpass", "highpass", "bandpass")
_ALIASES = {"low": "lowpass", "high": "highpass", "band": "bandpass"}


@dataclass(frozen=True)
class FilterSpec:
    """Which modes pass, and in which order-``a`` domain.

    Modes are positions in the eigenvalue-ascending ordering. ``lowpass``
    keeps ``k <= cutoff_hi``, ``highpass`` keeps ``k >= cutoff_lo`` and
    ``bandpass`` keeps ``cutoff_lo <= k <= cutoff_hi``. ``cutoff_hi=None``
    means the last mode. A positive ``rolloff`` replaces each hard edge by a
    raised-cosine ramp over that many modes outside the passband.
    """

    kind: str = "lowpass"
    cutoff_lo: int = 0
    cutoff_hi: int | None = None
    order: float = 1.0
    gain_passband: float = 1.0
    gain_stopband: float = 0.0
    rolloff: int = 0

    def __post_init__(self):
        kind = _ALIASES.get(self.kind, self.kind)
        if kind not in KINDS:
            raise ConfigError(f"unknown filter kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if self.cutoff_lo < 0:
            raise ConfigError("cutoff_lo must be >= 0")
        if self.cutoff_hi is not None and self.cutoff_hi < self.cutoff_lo:
            raise ConfigError("cutoff_hi must be >= cutoff_lo")
        if self.rolloff < 0:
            raise ConfigError("rolloff must be >= 0")
        for name in ("order", "gain_passband", "gain_stopband"):
            if not np.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")

    def mask(self, n):
        hi = n - 1 if self.cutoff_hi is None else self.cutoff_hi
        if hi >= n:
            raise ConfigError(f"cutoff_hi {hi} out of range for {n} modes")
        if self.cutoff_lo >= n:
            raise ConfigError(f"cutoff_lo {self.cutoff_lo} out of range for {n} modes")
        k = np.arange(n)
        lo = 0 if self.kind == "lowpass" else self.cutoff_lo
        hi = n - 1 if self.kind == "highpass" else hi
        # distance (in modes) outside the passband
        gap = np.maximum(lo - k, 0) + np.maximum(k - hi, 0)
        if self.rolloff:
            ramp = np.where(gap <= self.rolloff,
                            0.5 * (1.0 + np.cos(np.pi * gap / (self.rolloff + 1))), 0.0)
        else:
            ramp = (gap == 0).astype(np.float64)
        return self.gain_stopband + (self.gain_passband - self.gain_stopband) * ramp


def apply_filter(opr, basis, f, spec, full_output=False):
    """Real part of ``F^(-a) (mask * F^(a) f)``.

    With ``full_output=True`` returns ``(filtered, residue)`` where
    ``residue`` is the relative imaginary part discarded.
    """
    if opr.basis_id is not None and opr.basis_id != basis.basis_id:
        raise OperatorMismatchError("fractional operator was built from a different basis")
    f = _as_channels(f, opr.n)
    m = spec.mask(opr.n)
    sig = pmfht_forward(opr, f, spec.order)
    coeffs = sig.coeffs * (m if f.ndim == 1 else m[:, None])
    out = pmfht_inverse(opr, type(sig)(coeffs, sig.order, sig.basis_id), return_complex=True)
    if full_output:
        return out.real, imaginary_residue(out)
    return out.real


def smoothness_energy(basis, f):
    """Dirichlet energy ``sum_i lambda_i |<f, H_i>_B|^2`` of a single channel."""
    f = np.asarray(f, dtype=np.float64)
    if f.shape != (basis.n,):
        raise ValueError(f"signal of shape {f.shape} does not match {basis.n} points")
    c = basis.H.T @ (basis.b * f)
    return float(np.dot(basis.lambdas, c * c))
