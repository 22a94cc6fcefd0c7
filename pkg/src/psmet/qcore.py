"""Dense complex linear algebra over small Hilbert spaces.

States are 1-D complex arrays, operators are square 2-D complex arrays.
Validation helpers (:func:`as_state`, :func:`as_hermitian`, ...) coerce
input and raise on contract violations; everything else is a pure function
returning fresh arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import unitary_group

from .errors import DimensionMismatch, InputError, InvalidDim, NotHermitian, NotNormalized

MAX_DIM = 64
HERMITIAN_TOL = 1e-9
NORM_TOL = 1e-10
# amplitudes below this are treated as zero when fixing eigenvector phases
PHASE_FLOOR = 1e-10


# ---------------------------------------------------------------------------
# coercion and validation
# ---------------------------------------------------------------------------


def as_operator(M) -> np.ndarray:
    """Return ``M`` as a finite square complex matrix of dimension <= 64."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"operator must be square, got shape {M.shape}")
    if not 1 <= M.shape[0] <= MAX_DIM:
        raise InvalidDim(f"dimension {M.shape[0]} outside [1, {MAX_DIM}]")
    if not np.all(np.isfinite(M)):
        raise InputError("operator has non-finite entries")
    return M


def as_state(psi, normalized: bool = True) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise DimensionMismatch(f"state must be a vector, got shape {psi.shape}")
    if not 1 <= psi.shape[0] <= MAX_DIM:
        raise InvalidDim(f"dimension {psi.shape[0]} outside [1, {MAX_DIM}]")
    if not np.all(np.isfinite(psi)):
        raise InputError("state has non-finite amplitudes")
    if normalized:
        norm = np.linalg.norm(psi)
        if abs(norm - 1.0) > NORM_TOL:
            raise NotNormalized(f"state norm {norm!r} differs from 1")
    return psi


def hermiticity_error(M) -> float:
    M = np.asarray(M)
    return float(np.max(np.abs(M - M.conj().T))) if M.size else 0.0


def as_hermitian(H, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate Hermiticity and return the exactly symmetrized matrix."""
    H = as_operator(H)
    err = hermiticity_error(H)
    if err > tol:
        raise NotHermitian(f"max |H - H^dagger| = {err:.3e} exceeds {tol:g}")
    return 0.5 * (H + H.conj().T)


def is_hermitian(M, tol: float = 1e-12) -> bool:
    return hermiticity_error(M) <= tol


def is_unitary(U, tol: float = 1e-10) -> bool:
    U = np.asarray(U, dtype=complex)
    return bool(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))) <= tol)


def is_projector(P, tol: float = 1e-10) -> bool:
    P = np.asarray(P, dtype=complex)
    return hermiticity_error(P) <= tol and bool(np.max(np.abs(P @ P - P)) <= tol)


def is_density(rho, tol: float = 1e-10) -> bool:
    rho = np.asarray(rho, dtype=complex)
    if hermiticity_error(rho) > tol or abs(np.trace(rho) - 1.0) > tol:
        return False
    return bool(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0] >= -tol)


def as_density(rho, tol: float = 1e-10) -> np.ndarray:
    rho = as_operator(rho)
    if not is_density(rho, tol):
        raise InputError("not a density operator (Hermitian, unit trace, PSD)")
    return 0.5 * (rho + rho.conj().T)


def check_same_dim(*arrays) -> int:
    dims = {np.shape(a)[0] for a in arrays}
    if len(dims) != 1:
        raise DimensionMismatch(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()


def dagger(M) -> np.ndarray:
    return np.asarray(M).conj().T


def ket_bra(psi, phi=None) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    phi = psi if phi is None else np.asarray(phi, dtype=complex)
    return np.outer(psi, phi.conj())


def basis_state(dim: int, index: int) -> np.ndarray:
    e = np.zeros(dim, dtype=complex)
    e[index] = 1.0
    return e


def projector_onto(vectors) -> np.ndarray:
    """Projector onto the span of the orthonormal columns of ``vectors``."""
    V = np.asarray(vectors, dtype=complex)
    if V.ndim == 1:
        V = V[:, None]
    P = V @ V.conj().T
    return 0.5 * (P + P.conj().T)


def commutator(A, B) -> np.ndarray:
    return A @ B - B @ A


def commutes(A, B, tol: float = 1e-9) -> bool:
    scale = max(1.0, float(np.max(np.abs(A))), float(np.max(np.abs(B))))
    return bool(np.max(np.abs(commutator(A, B))) <= tol * scale)


# ---------------------------------------------------------------------------
# eigendecomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Eigensystem:
    """Ascending eigenvalues with column-orthonormal eigenvectors.

    ``multiplicity_index[j]`` is the position of column ``j`` inside its
    degenerate block (0 for nondegenerate eigenvalues).
    """

    values: np.ndarray
    vectors: np.ndarray
    multiplicity_index: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.values)

    def blocks(self) -> list[np.ndarray]:
        """Index arrays of the degenerate eigenvalue blocks, in order."""
        starts = np.flatnonzero(self.multiplicity_index == 0)
        ends = np.append(starts[1:], self.dim)
        return [np.arange(s, e) for s, e in zip(starts, ends)]


def degeneracy_tol(H) -> float:
    return 1e-9 * max(1.0, float(np.linalg.norm(H, 2)))


def _group(values, tol):
    labels = np.zeros(len(values), dtype=int)
    for j in range(1, len(values)):
        labels[j] = 0 if values[j] - values[j - 1] > tol else labels[j - 1] + 1
    return labels


def _fix_phase(v):
    nz = np.flatnonzero(np.abs(v) > PHASE_FLOOR)
    if nz.size:
        lead = v[nz[0]]
        v = v * (abs(lead) / lead)
    return v


def _lex_key(v):
    # descending lexicographic order on rounded (re, im) pairs
    pairs = np.round(np.column_stack([v.real, v.imag]), 9).ravel()
    return tuple(-pairs)


def eig_hermitian(H, refine=None) -> Eigensystem:
    """Deterministic eigendecomposition of a Hermitian matrix.

    Eigenvalues ascend. Inside a degenerate block the eigenvectors are
    optionally rotated to diagonalize the compression of ``refine`` onto
    the block, then phase-fixed (first nonzero amplitude positive real) and
    ordered by descending lexicographic comparison of their amplitudes.
    Passing a commuting ``refine`` operator yields common eigenvectors.
    """
    H = as_hermitian(H)
    values, vectors = np.linalg.eigh(H)
    tol = degeneracy_tol(H)
    mult = _group(values, tol)
    if refine is not None:
        R = as_hermitian(refine)
        check_same_dim(H, R)

    vectors = vectors.copy()
    starts = np.flatnonzero(mult == 0)
    ends = np.append(starts[1:], len(values))
    for s, e in zip(starts, ends):
        block = vectors[:, s:e]
        if e - s > 1 and refine is not None:
            comp = block.conj().T @ R @ block
            _, w = np.linalg.eigh(0.5 * (comp + comp.conj().T))
            block = block @ w
        cols = [_fix_phase(block[:, j]) for j in range(e - s)]
        if e - s > 1:
            cols.sort(key=_lex_key)
        vectors[:, s:e] = np.column_stack(cols)
    return Eigensystem(values=values, vectors=vectors, multiplicity_index=mult)


def spectral_range(A) -> float:
    """Difference between the largest and smallest eigenvalue of ``A``."""
    w = np.linalg.eigvalsh(as_hermitian(A))
    return float(w[-1] - w[0])


# ---------------------------------------------------------------------------
# evolution and moments
# ---------------------------------------------------------------------------


def unitary(A, theta: float) -> np.ndarray:
    """``exp(-i A theta)`` built from the spectral decomposition of ``A``."""
    es = eig_hermitian(A)
    V = es.vectors
    return (V * np.exp(-1j * es.values * theta)) @ V.conj().T


def evolve(rho0, A, theta: float) -> np.ndarray:
    rho0 = as_operator(rho0)
    A = as_hermitian(A)
    check_same_dim(rho0, A)
    if theta == 0:
        return rho0.copy()
    U = unitary(A, theta)
    return U @ rho0 @ U.conj().T


def evolve_state(psi0, A, theta: float) -> np.ndarray:
    psi0 = np.asarray(psi0, dtype=complex)
    A = as_hermitian(A)
    check_same_dim(psi0, A)
    if theta == 0:
        return psi0.copy()
    return unitary(A, theta) @ psi0


def evolution_derivative(rho, A) -> np.ndarray:
    """d(rho_theta)/d(theta) = -i [A, rho_theta] for rho_theta = U rho U^dagger."""
    return -1j * commutator(A, rho)


def expectation(rho, A) -> float:
    return float(np.trace(rho @ A).real)


def variance(rho, A) -> float:
    """Tr(rho A^2) - Tr(rho A)^2, clamped at zero against rounding."""
    rho = as_operator(rho)
    A = as_operator(A)
    check_same_dim(rho, A)
    mean = np.trace(rho @ A).real
    var = float(np.trace(rho @ A @ A).real - mean**2)
    if -1e-12 < var < 0:
        var = 0.0
    return var


def state_variance(psi, A) -> float:
    return variance(ket_bra(psi), A)


# ---------------------------------------------------------------------------
# random instances
# ---------------------------------------------------------------------------


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    G = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (G + G.conj().T)


def haar_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    return unitary_group.rvs(dim, random_state=rng)


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = dim if rank is None else rank
    G = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = G @ G.conj().T
    rho = rho / np.trace(rho).real
    return 0.5 * (rho + rho.conj().T)


def random_instance(dim: int, seed: int, commuting: bool):
    """Random (A, F, psi0) triple for the theorem suites.

    A is GUE-style Hermitian and psi0 Haar random. With ``commuting`` the
    projector F is built from a random nonempty proper subset of A's
    eigenvectors, so [A, F] = 0; otherwise it projects onto a random
    subspace spanned by Haar-random orthonormal vectors.
    """
    if dim < 2:
        raise InvalidDim(f"random_instance needs dim >= 2, got {dim}")
    if dim > MAX_DIM:
        raise InvalidDim(f"dimension {dim} exceeds {MAX_DIM}")
    rng = np.random.default_rng(seed)
    A = random_hermitian(dim, rng)
    psi0 = haar_state(dim, rng)
    rank = int(rng.integers(1, dim))
    if commuting:
        V = eig_hermitian(A).vectors
        idx = np.sort(rng.choice(dim, size=rank, replace=False))
        F = projector_onto(V[:, idx])
    else:
        F = projector_onto(haar_unitary(dim, rng)[:, :rank])
    return A, F, psi0
