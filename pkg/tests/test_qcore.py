import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from psmet import qcore
from psmet.errors import DimensionMismatch, InvalidDim, NotHermitian, NotNormalized

SZ = np.diag([1.0, -1.0]).astype(complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)


def test_eig_diagonal_sorted_with_permuted_identity():
    es = qcore.eig_hermitian(np.diag([3.0, -1.0, 1.0]))
    assert np.allclose(es.values, [-1, 1, 3])
    assert np.allclose(np.abs(es.vectors), np.eye(3)[:, [1, 2, 0]])


def test_eig_pauli_x():
    es = qcore.eig_hermitian(SX)
    assert np.allclose(es.values, [-1, 1])
    assert np.allclose(es.vectors[:, 0], MINUS)
    assert np.allclose(es.vectors[:, 1], PLUS)


def test_eig_residuals_random_6x6():
    H = qcore.random_hermitian(6, np.random.default_rng(42))
    es = qcore.eig_hermitian(H)
    for lam, v in zip(es.values, es.vectors.T):
        assert np.linalg.norm(H @ v - lam * v) < 1e-9
    assert qcore.is_unitary(es.vectors)


def test_eig_is_deterministic_and_phase_fixed():
    H = qcore.random_hermitian(5, np.random.default_rng(3))
    a = qcore.eig_hermitian(H)
    b = qcore.eig_hermitian(H.copy())
    assert np.array_equal(a.vectors, b.vectors)
    for v in a.vectors.T:
        first = v[np.argmax(np.abs(v) > 1e-10)]
        assert first.real > 0 and abs(first.imag) < 1e-15


def test_eig_degenerate_block_refined():
    A = np.diag([0.0, 0.0, 1.0]).astype(complex)
    F = qcore.projector_onto(np.array([1, 1, 0]) / np.sqrt(2))
    es = qcore.eig_hermitian(A, refine=F)
    assert [len(b) for b in es.blocks()] == [2, 1]
    # within the degenerate block the vectors must diagonalize F
    V = es.vectors[:, :2]
    G = V.conj().T @ F @ V
    assert abs(G[0, 1]) < 1e-12


def test_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        qcore.eig_hermitian(np.array([[0, 1], [0, 0]]))


def test_evolve_identity_at_zero():
    rho = qcore.random_density(3, np.random.default_rng(0))
    A = qcore.random_hermitian(3, np.random.default_rng(1))
    assert np.array_equal(qcore.evolve(rho, A, 0.0), rho)


def test_evolve_plus_to_minus_at_pi():
    out = qcore.evolve(qcore.ket_bra(PLUS), np.diag([0.0, 1.0]), np.pi)
    assert np.max(np.abs(out - qcore.ket_bra(MINUS))) < 1e-10


def test_unitary_matches_expm():
    rng = np.random.default_rng(7)
    A = qcore.random_hermitian(4, rng)
    assert np.allclose(qcore.unitary(A, 0.37), expm(-1j * 0.37 * A), atol=1e-12)


@pytest.mark.parametrize("psi,expected", [(np.array([1, 0]), 0.0), (PLUS, 0.25)])
def test_variance_examples(psi, expected):
    assert qcore.variance(qcore.ket_bra(psi), np.diag([0.0, 1.0])) == pytest.approx(expected, abs=1e-15)


def test_variance_maximally_mixed_sigma_z():
    assert qcore.variance(np.eye(2) / 2, SZ) == pytest.approx(1.0)


def test_spectral_range_examples():
    assert qcore.spectral_range(np.diag([-1.0, 1.0, 3.0])) == pytest.approx(4.0)
    assert qcore.spectral_range(np.eye(3)) == 0.0
    assert qcore.spectral_range(SZ) == pytest.approx(2.0)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(2, 6), shift=st.floats(-50, 50))
def test_shift_invariance(seed, dim, shift):
    rng = np.random.default_rng(seed)
    A = qcore.random_hermitian(dim, rng)
    rho = qcore.random_density(dim, rng)
    B = A + shift * np.eye(dim)
    assert abs(qcore.variance(rho, B) - qcore.variance(rho, A)) < 1e-9 * max(1, shift**2)
    assert qcore.spectral_range(B) == pytest.approx(qcore.spectral_range(A), rel=1e-9, abs=1e-9)
    assert qcore.spectral_range(2 * A) == pytest.approx(2 * qcore.spectral_range(A), rel=1e-12)


@pytest.mark.parametrize("seed", range(20))
def test_random_instance_commuting(seed):
    A, F, psi0 = qcore.random_instance(2, seed, commuting=True)
    assert np.max(np.abs(A @ F - F @ A)) < 1e-10
    assert qcore.is_projector(F)


def test_random_instance_noncommuting_projector():
    A, F, psi0 = qcore.random_instance(4, 7, commuting=False)
    assert np.max(np.abs(F @ F - F)) < 1e-10
    assert np.max(np.abs(F - F.conj().T)) < 1e-10
    assert abs(np.linalg.norm(psi0) - 1) < 1e-12


def test_random_instance_deterministic():
    a = qcore.random_instance(4, 11, commuting=False)
    b = qcore.random_instance(4, 11, commuting=False)
    for x, y in zip(a, b):
        assert np.array_equal(x, y)


def test_random_instance_rejects_small_dim():
    with pytest.raises(InvalidDim):
        qcore.random_instance(1, 0, commuting=True)


def test_validators():
    with pytest.raises(NotNormalized):
        qcore.as_state([1.0, 1.0])
    with pytest.raises(DimensionMismatch):
        qcore.check_same_dim(np.eye(2), np.eye(3))
    assert not qcore.is_density(np.diag([1.5, -0.5]))
