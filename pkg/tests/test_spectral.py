import numpy as np
import pytest
from scipy.linalg import expm

from conftest import SX, random_hermitian
from cdwork.errors import NonHermitianInput
from cdwork.spectral import eigendecompose, unitary_step


def test_diagonal_matrix_is_reordered_ascending():
    dec = eigendecompose(np.diag([1.0, -1.0]).astype(complex))
    assert np.allclose(dec.eigenvalues, [-1.0, 1.0], atol=1e-14)
    assert np.allclose(dec.eigenvectors, [[0.0, 1.0], [1.0, 0.0]], atol=1e-14)


def test_pauli_x_spectrum():
    dec = eigendecompose(0.25 * SX)
    assert np.allclose(dec.eigenvalues, [-0.25, 0.25], atol=1e-14)


def test_two_level_closed_form_eigenvalues():
    # +-sqrt(delta^2 + g^2)/2 at delta = 0.5, g = -10
    h = 0.25 * SX + 0.5 * (-10.0) * np.diag([1.0, -1.0])
    dec = eigendecompose(h)
    expected = np.sqrt(0.5 ** 2 + 10.0 ** 2) / 2.0
    assert expected == pytest.approx(5.006246098625197, abs=1e-12)
    assert np.allclose(dec.eigenvalues, [-expected, expected], atol=1e-12)


def test_reconstruction_roundtrip_random_dims():
    rng = np.random.default_rng(7)
    for dim in (2, 3, 5, 16, 33, 64):
        a = random_hermitian(rng, dim, scale=3.0)
        dec = eigendecompose(a)
        recon = (dec.eigenvectors * dec.eigenvalues) @ dec.eigenvectors.conj().T
        scale = 1.0 + np.max(np.abs(a))
        assert np.max(np.abs(a - recon)) <= 1e-10 * scale
        assert np.all(np.diff(dec.eigenvalues) >= 0.0)


def test_orthonormality():
    rng = np.random.default_rng(11)
    a = random_hermitian(rng, 24)
    dec = eigendecompose(a)
    gram = dec.eigenvectors.conj().T @ dec.eigenvectors
    assert np.max(np.abs(gram - np.eye(24))) <= 1e-10


def test_gauge_largest_entry_real_nonnegative():
    rng = np.random.default_rng(13)
    dec = eigendecompose(random_hermitian(rng, 17))
    for j in range(17):
        column = dec.eigenvectors[:, j]
        pivot = column[int(np.argmax(np.abs(column)))]
        assert abs(pivot.imag) <= 1e-14
        assert pivot.real >= -1e-14


def test_gauge_determinism_is_bitwise():
    rng = np.random.default_rng(17)
    a = random_hermitian(rng, 12)
    first = eigendecompose(a)
    second = eigendecompose(a.copy())
    assert np.array_equal(first.eigenvalues, second.eigenvalues)
    assert np.array_equal(first.eigenvectors, second.eigenvectors)


def test_non_hermitian_rejected():
    with pytest.raises(NonHermitianInput):
        eigendecompose(np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex))


def test_bad_shapes_rejected():
    with pytest.raises(ValueError):
        eigendecompose(np.zeros((1, 1), dtype=complex))
    with pytest.raises(ValueError):
        eigendecompose(np.zeros((2, 3), dtype=complex))


def test_unitary_step_zero_matrix_is_identity():
    u = unitary_step(np.zeros((3, 3), dtype=complex), dt=0.37)
    assert np.allclose(u, np.eye(3), atol=1e-14)


def test_unitary_step_diagonal_phases():
    u = unitary_step(np.diag([1.0, -1.0]).astype(complex), dt=np.pi)
    assert np.allclose(u, -np.eye(2), atol=1e-12)


def test_unitary_step_pauli_full_period():
    # exp(-i (delta/2) sx dt) = cos(delta dt / 2) - i sin(delta dt / 2) sx
    delta = 0.5
    u = unitary_step(0.5 * delta * SX, dt=2.0 * np.pi / delta)
    assert np.allclose(u, -np.eye(2), atol=1e-12)


def test_unitary_step_is_unitary():
    rng = np.random.default_rng(19)
    a = random_hermitian(rng, 20, scale=2.0)
    u = unitary_step(a, dt=0.83)
    assert np.max(np.abs(u.conj().T @ u - np.eye(20))) <= 1e-10


def test_unitary_step_composition():
    rng = np.random.default_rng(23)
    a = random_hermitian(rng, 9)
    composed = unitary_step(a, 0.4) @ unitary_step(a, 0.9)
    assert np.max(np.abs(composed - unitary_step(a, 1.3))) <= 1e-10


def test_unitary_step_matches_independent_exponential():
    rng = np.random.default_rng(29)
    a = random_hermitian(rng, 8)
    assert np.max(np.abs(unitary_step(a, 0.61) - expm(-1j * a * 0.61))) <= 1e-10


def test_unitary_step_requires_finite_dt():
    with pytest.raises(ValueError):
        unitary_step(np.zeros((2, 2), dtype=complex), dt=np.inf)
