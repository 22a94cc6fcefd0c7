import csv
import io
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import kd_loops, random_hermitian, random_ket, random_projector
from psmet import kdq, postselect, qcore
from psmet.errors import NotPure, SingularOverlap

SZ = np.diag([1.0, -1.0]).astype(complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
PX = np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex)  # |+><+|
PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)
ZERO, ONE = np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)


def _noncommuting(seed, dim=None):
    rng = np.random.default_rng(seed)
    d = dim or 2 + seed % 5
    A = random_hermitian(d, rng)
    F = random_projector(d, int(rng.integers(1, d)), rng)
    return A, F, random_ket(d, rng), rng


def test_commuting_collapses_to_iverson_form():
    A = np.diag([0.0, 1.0, 2.0])
    F = np.diag([1.0, 0.0, 1.0])
    rho = qcore.random_density(3, np.random.default_rng(1))
    kd = kdq.kd_doubly_extended(rho, A, F)
    O = np.abs(kd.overlaps())
    assert np.allclose(O, np.round(O))
    # only a = a' = the matching f survives
    for a in range(3):
        for b in range(3):
            for f in range(3):
                match = O[f, a] > 0.5 and a == b
                want = rho[a, a] if match else 0.0
                assert kd.values[a, b, f] == pytest.approx(want, abs=1e-14)


def test_plus_state_z_x_bases_by_hand():
    kd = kdq.kd_doubly_extended(PLUS, SZ, SX)
    # sigma_x eigenvalue +1 is |+>: every entry there is 1/4
    f_plus = int(np.argmax(kd.eigs_f))
    assert np.allclose(kd.values[:, :, f_plus], 0.25)
    # for |->, q = <-|a><b|-> / 2 carries the sign of the a, b amplitudes
    f_minus = 1 - f_plus
    sign = np.array([np.vdot(MINUS, kd.basis_a[:, a]).real for a in range(2)])
    assert np.allclose(kd.values[:, :, f_minus], np.outer(sign, sign) / 2)
    assert np.allclose(kd.values.imag, 0)
    assert np.allclose(kd.values, kd_loops(qcore.ket_bra(PLUS), kd.basis_a, kd.basis_f))


def test_maximally_mixed_is_nonnegative():
    A, F, _, _ = _noncommuting(3, 4)
    kd = kdq.kd_doubly_extended(np.eye(4) / 4, A, F)
    O = kd.overlaps()
    for a in range(4):
        assert np.allclose(kd.values[a, a, :], np.abs(O[:, a]) ** 2 / 4)
    assert kdq.negativity(kd).is_classical
    assert np.allclose(kd.values.sum(axis=(0, 1)), 0.25)


@pytest.mark.parametrize("seed", range(20))
def test_tensor_matches_loops(seed):
    A, F, psi, rng = _noncommuting(seed)
    rho = qcore.random_density(A.shape[0], rng)
    kd = kdq.kd_doubly_extended(rho, A, F)
    assert np.allclose(kd.values, kd_loops(rho, kd.basis_a, kd.basis_f), atol=1e-13)


def test_standard_kd_diagonal_state():
    A, F, _, _ = _noncommuting(2, 3)
    es = qcore.eig_hermitian(A)
    rho = es.vectors @ np.diag([0.5, 0.3, 0.2]) @ es.vectors.conj().T
    kd = kdq.kd_doubly_extended(rho, A, F)
    q = kdq.kd_standard(rho, A, F)
    assert np.allclose(q, np.array([0.5, 0.3, 0.2])[:, None] * np.abs(kd.overlaps().T) ** 2)


@pytest.mark.parametrize("seed", range(20))
def test_standard_is_marginal(seed):
    A, F, psi, _ = _noncommuting(seed)
    kd = kdq.kd_doubly_extended(psi, A, F)
    assert np.max(np.abs(kd.values.sum(axis=1) - kdq.kd_standard(psi, A, F))) < 1e-12


def test_standard_kd_negative_entry_by_hand():
    psi = np.cos(0.3) * ZERO + np.sin(0.3) * ONE
    q = kdq.kd_standard(psi, SZ, SX)
    kd = kdq.kd_doubly_extended(psi, SZ, SX)
    a1 = int(np.argmax(np.abs(kd.basis_a[1])))  # index of |1>
    fm = int(np.argmin(kd.eigs_f))  # index of |->
    by_hand = np.vdot(MINUS, ONE) * np.vdot(ONE, psi) * np.vdot(psi, MINUS)
    assert by_hand.real < 0
    assert q[a1, fm] == pytest.approx(by_hand, abs=1e-14)


def test_reconstruct_round_trip_haar_bases():
    rng = np.random.default_rng(4)
    rho = qcore.random_density(4, rng)
    A, F = random_hermitian(4, rng), random_hermitian(4, rng)
    kd = kdq.kd_doubly_extended(rho, A, F)
    assert np.max(np.abs(kdq.reconstruct_rho(kd) - rho)) < 1e-8


def test_reconstruct_mutually_unbiased():
    rho = qcore.random_density(2, np.random.default_rng(6))
    kd = kdq.kd_doubly_extended(rho, SZ, SX)
    assert np.max(np.abs(kdq.reconstruct_rho(kd) - rho)) < 1e-10


def test_reconstruct_singular_overlap():
    rho = qcore.random_density(2, np.random.default_rng(6))
    kd = kdq.kd_doubly_extended(rho, SZ, SZ)
    with pytest.raises(SingularOverlap):
        kdq.reconstruct_rho(kd)
    assert np.max(np.abs(kdq.reconstruct_rho(kd, perturb=True) - rho)) < 1e-8


def test_conditional_all_is_identity():
    A, F, psi, _ = _noncommuting(1)
    kd = kdq.kd_doubly_extended(psi, A, F)
    cond, p = kdq.conditional_kd(kd, "all")
    assert p == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(cond, kd.values / p)


@pytest.mark.parametrize("seed", range(10))
def test_conditional_commuting_gives_probabilities(seed):
    A, F, psi0 = qcore.random_instance(4, seed, commuting=True)
    rho = qcore.ket_bra(qcore.evolve_state(psi0, A, 0.3))
    kd = kdq.kd_doubly_extended(rho, A, F)
    cond, p = kdq.conditional_kd(kd)
    q_a = cond.sum(axis=(1, 2))
    want = np.array([np.vdot(v, rho @ F @ v) for v in kd.basis_a.T]) / p
    assert np.allclose(q_a, want, atol=1e-12)
    assert np.allclose(cond.imag, 0, atol=1e-12)
    assert np.all(q_a.real >= -1e-12)


@pytest.mark.parametrize("seed", range(20))
def test_conditional_probability_matches_postselect(seed):
    A, F, psi, _ = _noncommuting(seed)
    kd = kdq.kd_doubly_extended(psi, A, F)
    _, p = kdq.conditional_kd(kd)
    assert p == pytest.approx(postselect.apply_postselection(psi, F).p_ps, abs=1e-10)


@pytest.mark.parametrize("seed", range(30))
def test_qfi_from_kd_matches_trace_form(seed):
    A, F, psi0, rng = _noncommuting(seed)
    theta = rng.uniform(-1, 1)
    psi = qcore.evolve_state(psi0, A, theta)
    if postselect.apply_postselection(psi, F).p_ps < 0.01:
        pytest.skip("rare postselection")
    kd = kdq.kd_doubly_extended(psi, A, F)
    want = postselect.postselected_qfi(psi0, A, F, theta).value
    assert kdq.qfi_from_kd(kd).value == pytest.approx(want, rel=1e-8, abs=1e-10)


@pytest.mark.parametrize("seed", range(10))
def test_qfi_from_kd_all_outcomes(seed):
    A, F, psi, _ = _noncommuting(seed)
    kd = kdq.kd_doubly_extended(psi, A, F)
    assert kdq.qfi_from_kd(kd, "all").value == pytest.approx(4 * qcore.state_variance(psi, A), rel=1e-9)


@pytest.mark.parametrize("seed", range(20))
def test_commuting_bound_and_classicality(seed):
    A, F, psi0 = qcore.random_instance(3, seed, commuting=True)
    kd = kdq.kd_doubly_extended(psi0, A, F)
    assert kdq.qfi_from_kd(kd).value <= qcore.spectral_range(A) ** 2 + 1e-8
    assert kdq.negativity(kd, None).is_classical
    assert kdq.negativity(kd, "all").is_classical


def test_maximally_mixed_classical_any_bases():
    A, F, _, _ = _noncommuting(12, 5)
    assert kdq.negativity(kdq.kd_doubly_extended(np.eye(5) / 5, A, F)).is_classical


def test_weak_values():
    assert kdq.weak_value(PLUS, PLUS, PLUS) == pytest.approx(1.0)
    assert kdq.weak_value(ZERO, PLUS, PLUS) == pytest.approx(0.5)
    psi = np.cos(0.7) * ZERO + np.sin(0.7) * ONE
    w = kdq.weak_value(ZERO, MINUS, psi)
    assert w == pytest.approx(np.cos(0.7) / (np.cos(0.7) - np.sin(0.7)))
    assert w.real > 1


@pytest.mark.parametrize("seed", range(20))
def test_pure_factorization(seed):
    A, F, psi, rng = _noncommuting(seed)
    B = random_hermitian(A.shape[0], rng)
    kd = kdq.kd_doubly_extended(psi, A, B)
    assert kdq.pure_factorization_residual(kd, psi) < 1e-10


def test_pure_factorization_small_cases():
    kd = kdq.kd_doubly_extended(PLUS, SZ, SX)
    assert kdq.pure_factorization_residual(kd, PLUS) < 1e-12
    with pytest.raises(NotPure):
        kdq.pure_factorization_residual(kd, np.eye(2) / 2)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), shift=st.floats(-20, 20))
def test_eigenvalue_shift_invariance(seed, shift):
    A, F, psi0 = qcore.random_instance(3, seed, commuting=True)
    kd = kdq.kd_doubly_extended(psi0, A, F)
    try:
        base = kdq.qfi_from_kd(kd).value
    except Exception:
        return
    assert kdq.negativity(kd, None).max_imag_abs <= 1e-10
    shifted = replace(kd, eigs_a=kd.eigs_a + shift)
    assert kdq.qfi_from_kd(shifted).value == pytest.approx(base, rel=1e-8, abs=1e-8 * (1 + shift**2))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), angle=st.floats(0, np.pi))
def test_rotation_within_degenerate_block(seed, angle):
    # A has a doubly degenerate eigenvalue; any orthonormal basis of that
    # block is a valid eigenbasis and must give the same postselected QFI
    rng = np.random.default_rng(seed)
    W = qcore.haar_unitary(4, rng)
    A = W @ np.diag([0.0, 0.0, 1.0, 2.5]) @ W.conj().T
    F = random_projector(4, 2, rng)
    psi = random_ket(4, rng)
    kd = kdq.kd_doubly_extended(psi, A, F)
    R = np.eye(4, dtype=complex)
    c, s = np.cos(angle), np.sin(angle)
    R[:2, :2] = [[c, -s * 1j], [-s * 1j, c]]
    rotated = kdq.kd_doubly_extended(psi, A, F, basis_a=kd.basis_a @ R)
    assert kdq.qfi_from_kd(rotated).value == pytest.approx(kdq.qfi_from_kd(kd).value, rel=1e-9)


def test_csv_layout():
    kd = kdq.kd_doubly_extended(PLUS, SZ, SX)
    buf = io.StringIO()
    kdq.write_csv(kd, buf)
    rows = list(csv.reader(io.StringIO(buf.getvalue())))
    assert tuple(rows[0]) == kdq.CSV_HEADER
    assert len(rows) == 1 + 8
    total = sum(complex(float(r[5]), float(r[6])) for r in rows[1:])
    assert total == pytest.approx(1.0)
