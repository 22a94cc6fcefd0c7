"""Kirkwood-Dirac quasiprobabilities and the quasiprobability form of the QFI.

The doubly extended distribution of a state rho over an eigenbasis {|a>}
of the generator and an eigenbasis {|f>} of the postselection operator is

    q[a, a', f] = <f|a> <a|rho|a'> <a'|f>

Summing over a' gives the standard Kirkwood-Dirac distribution
q[a, f] = <f|a> <a|rho|f>.

Basis choice: {|a>} comes from :func:`qcore.eig_hermitian` on A with
degenerate blocks refined by F. When A and F commute the very same vectors
(reordered by F eigenvalue) serve as {|f>}, so the tensor collapses to the
Iverson-bracket form exactly. Otherwise {|f>} diagonalizes F with its
degenerate blocks refined by A.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import fisher, qcore
from .errors import (
    InputError,
    NotPure,
    NumericalDomainError,
    OrthogonalPostselection,
    SingularOverlap,
    VanishingPostselection,
)

CLASSICAL_TOL = 1e-10
OVERLAP_FLOOR = 1e-12
P_FLOOR = 1e-12

CSV_HEADER = ("a_index", "ap_index", "f_index", "a_value", "ap_value", "re_q", "im_q")


@dataclass(frozen=True)
class KDTensor:
    """Doubly extended KD distribution, ``values[a, a', f]``.

    ``state`` keeps the source density matrix when known; it is what allows
    :func:`reconstruct_rho` to re-express the state in a perturbed basis.
    """

    values: np.ndarray
    basis_a: np.ndarray
    basis_f: np.ndarray
    eigs_a: np.ndarray
    eigs_f: np.ndarray
    state: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def overlaps(self) -> np.ndarray:
        """Matrix of <f|a>, indexed [f, a]."""
        return self.basis_f.conj().T @ self.basis_a

    def postselected_indices(self) -> np.ndarray:
        """Indices f with F eigenvalue 1; requires F to be a projector."""
        if np.any(np.minimum(np.abs(self.eigs_f), np.abs(self.eigs_f - 1)) > 1e-8):
            raise InputError("F is not a projector; pass ps_indices explicitly")
        return np.flatnonzero(self.eigs_f > 0.5)


@dataclass(frozen=True)
class NegativityReport:
    min_real: float
    negativity_mass: float
    max_imag_abs: float
    is_classical: bool


def _as_density(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim == 1:
        return qcore.ket_bra(qcore.as_state(rho))
    return qcore.as_operator(rho)


def _diagonal_values(basis, H) -> np.ndarray:
    return np.einsum("ij,ik,kj->j", basis.conj(), H, basis).real


def kd_bases(A, F):
    """Eigenbases ``(basis_a, eigs_a, basis_f, eigs_f)`` used for the tensor."""
    A = qcore.as_hermitian(A)
    F = qcore.as_hermitian(F)
    qcore.check_same_dim(A, F)
    ea = qcore.eig_hermitian(A, refine=F)
    if qcore.commutes(A, F):
        fvals = _diagonal_values(ea.vectors, F)
        order = np.argsort(fvals, kind="stable")
        return ea.vectors, ea.values, ea.vectors[:, order], fvals[order]
    ef = qcore.eig_hermitian(F, refine=A)
    return ea.vectors, ea.values, ef.vectors, ef.values


def _check_basis(V, dim):
    V = np.asarray(V, dtype=complex)
    if V.shape != (dim, dim) or not qcore.is_unitary(V):
        raise InputError("basis must be a unitary matrix of matching dimension")
    return V


def _tensor(rho, Va, Vf):
    O = Vf.conj().T @ Va
    R = Va.conj().T @ rho @ Va
    return np.einsum("fa,ab,fb->abf", O, R, O.conj())


def kd_doubly_extended(rho, A, F, basis_a=None, basis_f=None) -> KDTensor:
    """Doubly extended KD distribution of ``rho`` (density matrix or pure ket).

    Explicit ``basis_a`` / ``basis_f`` override the default eigenbases; they
    must still diagonalize A and F respectively for the eigenvalue labels
    to mean anything.
    """
    rho = _as_density(rho)
    A = qcore.as_hermitian(A)
    F = qcore.as_hermitian(F)
    dim = qcore.check_same_dim(rho, A, F)
    Va, ea, Vf, ef = kd_bases(A, F)
    if basis_a is not None:
        Va = _check_basis(basis_a, dim)
        ea = _diagonal_values(Va, A)
    if basis_f is not None:
        Vf = _check_basis(basis_f, dim)
        ef = _diagonal_values(Vf, F)
    return KDTensor(_tensor(rho, Va, Vf), Va, Vf, ea, ef, rho)


def kd_standard(rho, A, F, basis_a=None, basis_f=None) -> np.ndarray:
    """Standard KD distribution q[a, f] = <f|a><a|rho|f>."""
    rho = _as_density(rho)
    A = qcore.as_hermitian(A)
    F = qcore.as_hermitian(F)
    dim = qcore.check_same_dim(rho, A, F)
    Va, _, Vf, _ = kd_bases(A, F)
    if basis_a is not None:
        Va = _check_basis(basis_a, dim)
    if basis_f is not None:
        Vf = _check_basis(basis_f, dim)
    return _standard(rho, Va, Vf)


def _standard(rho, Va, Vf):
    O = Vf.conj().T @ Va
    return O.T * (Va.conj().T @ rho @ Vf)


def _expand(kd: KDTensor) -> np.ndarray:
    O = kd.overlaps()
    M = kd.values.sum(axis=1) / O.T
    return kd.basis_a @ M @ kd.basis_f.conj().T


def reconstruct_rho(kd: KDTensor, perturb: bool = False, seed: int = 0,
                    epsilon: float = 1e-7, attempts: int = 3) -> np.ndarray:
    """Expand the state as sum over (a, a', f) of |a><f| q[a, a', f] / <f|a>.

    When some overlap <f|a> vanishes the expansion is undefined. With
    ``perturb`` the F basis is rotated by a random unitary of angle
    ``epsilon`` (orthonormality preserved) and the tensor recomputed from
    the stored source state, up to ``attempts`` times.
    """
    if np.min(np.abs(kd.overlaps())) >= OVERLAP_FLOOR:
        return _expand(kd)
    if not perturb:
        raise SingularOverlap("some <f|a> vanishes; enable perturb to rotate the F basis")
    if kd.state is None:
        raise SingularOverlap("perturbed reconstruction needs the source state")
    rng = np.random.default_rng(seed)
    for _ in range(attempts):
        W = qcore.unitary(qcore.random_hermitian(kd.dim, rng), epsilon)
        Vf = W @ kd.basis_f
        trial = KDTensor(_tensor(kd.state, kd.basis_a, Vf), kd.basis_a, Vf,
                         kd.eigs_a, kd.eigs_f, kd.state)
        if np.min(np.abs(trial.overlaps())) >= OVERLAP_FLOOR:
            return _expand(trial)
    raise SingularOverlap(f"overlaps still vanish after {attempts} perturbations")


def _indices(kd: KDTensor, ps_indices):
    if ps_indices is None:
        return kd.postselected_indices()
    if isinstance(ps_indices, str) and ps_indices == "all":
        return np.arange(kd.dim)
    idx = np.asarray(ps_indices, dtype=int).ravel()
    if idx.size and (idx.min() < 0 or idx.max() >= kd.dim):
        raise InputError(f"postselection indices out of range for dim {kd.dim}")
    return idx


def conditional_kd(kd: KDTensor, ps_indices=None):
    """Restrict to f in the postselected set and divide by p_ps.

    ``ps_indices`` defaults to the eigenvalue-1 eigenvectors of F; pass
    ``"all"`` for the unconditioned distribution.
    Returns ``(tensor, p_ps)``.
    """
    idx = _indices(kd, ps_indices)
    sub = kd.values[:, :, idx]
    p = float(sub.sum().real)
    if p <= P_FLOOR:
        raise VanishingPostselection(f"p_ps = {p:.3e}")
    return sub / p, p


def qfi_from_kd(kd: KDTensor, ps_indices=None) -> fisher.FisherReport:
    """Postselected QFI from the conditional quasiprobabilities.

    I = 4 sum q/p a a' - 4 |sum q/p a|^2, sums over a, a' and f in the
    postselected set.
    """
    cond, _ = conditional_kd(kd, ps_indices)
    a = kd.eigs_a
    first = 4 * np.einsum("abf,a,b->", cond, a, a)
    if abs(first.imag) > 1e-9 * max(1.0, abs(first.real)):
        raise NumericalDomainError(f"first term has imaginary residue {first.imag:.3e}")
    second = 4 * abs(np.einsum("abf,a->", cond, a)) ** 2
    return fisher.make_report(first.real - second, "quasiprobability",
                              scale=max(abs(first.real), second))


def negativity(kd: KDTensor, ps_indices="all") -> NegativityReport:
    cond, _ = conditional_kd(kd, ps_indices)
    re = cond.real
    min_real = float(re.min())
    max_imag = float(np.abs(cond.imag).max())
    return NegativityReport(
        min_real=min_real,
        negativity_mass=float(np.clip(-re, 0, None).sum()),
        max_imag_abs=max_imag,
        is_classical=min_real >= -CLASSICAL_TOL and max_imag <= CLASSICAL_TOL,
    )


def weak_value(a_state, f_state, psi) -> complex:
    """<f|a><a|psi>/<f|psi>."""
    a = qcore.as_state(a_state)
    f = qcore.as_state(f_state)
    psi = qcore.as_state(psi)
    qcore.check_same_dim(a, f, psi)
    denom = np.vdot(f, psi)
    if abs(denom) <= 1e-12:
        raise OrthogonalPostselection("<f|psi> vanishes")
    return complex(np.vdot(f, a) * np.vdot(a, psi) / denom)


def pure_factorization_residual(kd: KDTensor, rho) -> float:
    """Max deviation from q[a,a',f] = q[a,f] conj(q[a',f]) / p_f for a pure state.

    Outcomes with p_f = <f|rho|f> at or below 1e-12 are skipped.
    """
    rho = _as_density(rho)
    qcore.check_same_dim(rho, kd.values)
    if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[-1] < 1 - 1e-8:
        raise NotPure("largest eigenvalue of rho is below 1")
    qs = _standard(rho, kd.basis_a, kd.basis_f)
    pf = np.einsum("if,ij,jf->f", kd.basis_f.conj(), rho, kd.basis_f).real
    keep = pf > P_FLOOR
    if not np.any(keep):
        return 0.0
    pred = np.einsum("af,bf->abf", qs[:, keep], qs[:, keep].conj()) / pf[keep]
    return float(np.max(np.abs(kd.values[:, :, keep] - pred)))


def write_csv(kd: KDTensor, fh) -> None:
    """Write the tensor to an open text file, one row per (a, a', f)."""
    from .io import fmt_float as fmt

    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    d = kd.dim
    for a in range(d):
        for b in range(d):
            for f in range(d):
                q = kd.values[a, b, f]
                w.writerow([a, b, f, fmt(float(kd.eigs_a[a])), fmt(float(kd.eigs_a[b])),
                            fmt(float(q.real)), fmt(float(q.imag))])
