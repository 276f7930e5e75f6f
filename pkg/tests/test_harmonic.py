import numpy as np
import pytest

from fracharm import (
    manifold_fourier_matrix,
    pmht_forward,
    pmht_inverse,
    solve_harmonic_basis,
)
from fracharm.errors import ConfigError, OperatorMismatchError
from fracharm.harmonic import SpectralSignal

from conftest import build_basis, circle_points, sphere_points


def naive_forward(H, b, f):
    n = len(b)
    out = np.zeros(n)
    for i in range(n):
        s = 0.0
        for k in range(n):
            s += H[k, i] * b[k] * f[k]
        out[i] = s
    return out


def test_basis_invariants(blob100):
    pair, basis = blob100
    H, b = basis.H, basis.b
    assert np.abs(H.T @ (b[:, None] * H) - np.eye(basis.n)).max() <= 1e-8
    assert np.all(np.diff(basis.lambdas) >= 0)
    assert basis.lambdas[0] <= 1e-8 * basis.lambdas[-1]
    h0 = H[:, 0]
    assert np.abs(h0 - h0.mean()).max() <= 1e-6 * np.linalg.norm(h0)
    top = np.abs(H).argmax(axis=0)
    assert np.all(H[top, np.arange(basis.n)] > 0)


def test_eigenpairs_solve_generalized_problem(blob100):
    pair, basis = blob100
    Q = pair.Q.toarray()
    resid = Q @ basis.H + (pair.b[:, None] * basis.H) * basis.lambdas[None, :]
    assert np.abs(resid).max() <= 1e-9 * np.abs(Q).max()


def test_basis_is_deterministic(blob100):
    pair, basis = blob100
    again = solve_harmonic_basis(pair)
    assert again.basis_id == basis.basis_id
    assert again.H.tobytes() == basis.H.tobytes()


def test_dense_limit():
    pair, _ = build_basis(sphere_points(60, seed=1))
    with pytest.raises(ConfigError):
        solve_harmonic_basis(pair, dense_limit=50)


def test_circle_spectrum_ratios():
    _, basis = build_basis(circle_points(200))
    lam = basis.lambdas
    assert lam[2] / lam[1] == pytest.approx(1.0, rel=0.10)
    assert lam[3] / lam[1] == pytest.approx(4.0, rel=0.10)
    assert lam[4] / lam[3] == pytest.approx(1.0, rel=0.10)
    assert lam[5] / lam[1] == pytest.approx(9.0, rel=0.10)


def _groups(lam):
    # l-th multiplet of the sphere occupies modes l^2 .. (l+1)^2 - 1
    return np.array([lam[l * l:(l + 1) ** 2].mean() for l in range(1, 4)])


def test_sphere_spectrum_ratios_default_t():
    _, basis = build_basis(sphere_points(500, seed=0))
    g = _groups(basis.lambdas)
    assert g[1] / g[0] == pytest.approx(3.0, rel=0.15)


def test_sphere_spectrum_ratios_small_t():
    _, basis = build_basis(sphere_points(500, seed=0), t=lambda e: e * e)
    g = _groups(basis.lambdas)
    assert g[1] / g[0] == pytest.approx(3.0, rel=0.15)
    assert g[2] / g[0] == pytest.approx(6.0, rel=0.15)


def test_forward_of_basis_column_is_unit_vector(blob100):
    _, basis = blob100
    c = pmht_forward(basis, basis.H[:, 3]).coeffs
    e = np.zeros(basis.n)
    e[3] = 1.0
    np.testing.assert_allclose(c, e, atol=1e-9)


def test_constant_signal_isolated(blob100):
    _, basis = blob100
    c = pmht_forward(basis, np.full(basis.n, 2.5)).coeffs
    assert abs(c[0]) > 0
    assert np.abs(c[1:]).max() <= 1e-9 * abs(c[0])


def test_forward_matches_naive_loop(blob50):
    _, basis = blob50
    f = np.random.default_rng(3).standard_normal(basis.n)
    np.testing.assert_allclose(pmht_forward(basis, f).coeffs.real,
                               naive_forward(basis.H, basis.b, f), rtol=1e-10, atol=1e-12)


def test_round_trip_and_parseval(blob100):
    _, basis = blob100
    rng = np.random.default_rng(8)
    for _ in range(10):
        f = rng.standard_normal(basis.n)
        sig = pmht_forward(basis, f)
        g = pmht_inverse(basis, sig)
        assert np.linalg.norm(g - f) <= 1e-9 * np.linalg.norm(f)
        energy = f @ (basis.b * f)
        assert np.sum(np.abs(sig.coeffs) ** 2) == pytest.approx(energy, rel=1e-8)


def test_truncated_reconstruction(blob50):
    _, basis = blob50
    f = np.random.default_rng(2).standard_normal(basis.n)
    sig = pmht_forward(basis, f)
    k = 10
    c = sig.coeffs.copy()
    c[k:] = 0
    got = pmht_inverse(basis, SpectralSignal(c, 1.0, basis.basis_id))
    expect = np.array([sum(basis.H[i, j] * c[j].real for j in range(k)) for i in range(basis.n)])
    np.testing.assert_allclose(got, expect, rtol=1e-10, atol=1e-12)


def test_mode_zero_reconstructs_constant(blob50):
    _, basis = blob50
    e0 = np.zeros(basis.n, dtype=complex)
    e0[0] = 1
    g = pmht_inverse(basis, SpectralSignal(e0, 1.0, basis.basis_id))
    assert np.ptp(g) <= 1e-6 * np.abs(g).max()


def test_multichannel(blob50):
    _, basis = blob50
    f = np.random.default_rng(1).standard_normal((basis.n, 3))
    sig = pmht_forward(basis, f)
    assert sig.coeffs.shape == (basis.n, 3)
    np.testing.assert_allclose(sig.coeffs[:, 2], pmht_forward(basis, f[:, 2]).coeffs)
    np.testing.assert_allclose(pmht_inverse(basis, sig), f, atol=1e-10)


def test_inverse_rejects_mismatch(blob50, blob100):
    _, b50 = blob50
    sig = pmht_forward(b50, np.ones(b50.n))
    with pytest.raises(OperatorMismatchError):
        pmht_inverse(blob100[1], sig)
    with pytest.raises(OperatorMismatchError):
        pmht_inverse(b50, SpectralSignal(sig.coeffs, 0.5, sig.basis_id))
    with pytest.raises(ValueError):
        pmht_forward(b50, np.ones(3))


def test_fourier_matrix(blob100):
    _, basis = blob100
    F = manifold_fourier_matrix(basis)
    assert np.abs(F @ basis.H - np.eye(basis.n)).max() <= 1e-8
    e2 = np.zeros(basis.n)
    e2[2] = 1
    np.testing.assert_allclose(F @ basis.H[:, 2], e2, atol=1e-9)
    f = np.random.default_rng(0).standard_normal(basis.n)
    np.testing.assert_allclose(F @ f, pmht_forward(basis, f).coeffs.real, rtol=1e-12, atol=1e-12)
