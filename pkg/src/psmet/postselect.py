"""Projective postselection of evolved states and the postselected QFI."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fisher, qcore
from .errors import DegenerateGenerator, InputError, VanishingPostselection

P_FLOOR = 1e-12


@dataclass(frozen=True)
class Postselection:
    """Projector F together with an orthonormal basis of its range.

    ``basis`` holds the states |f> of the accepted set as columns, so that
    F = sum_f |f><f|.
    """

    projector: np.ndarray
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.projector.shape[0]

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def from_projector(cls, F) -> "Postselection":
        F = qcore.as_hermitian(F, tol=1e-10)
        if not qcore.is_projector(F):
            raise InputError("postselection operator is not a projector")
        es = qcore.eig_hermitian(F)
        basis = es.vectors[:, es.values > 0.5]
        return cls(F, basis)

    @classmethod
    def from_vectors(cls, vectors) -> "Postselection":
        V = np.asarray(vectors, dtype=complex)
        if V.ndim == 1:
            V = V[:, None]
        gram = V.conj().T @ V
        if np.max(np.abs(gram - np.eye(V.shape[1]))) > 1e-10:
            raise InputError("postselection vectors are not orthonormal")
        return cls(qcore.projector_onto(V), V)


def as_postselection(ps) -> Postselection:
    return ps if isinstance(ps, Postselection) else Postselection.from_projector(ps)


@dataclass(frozen=True)
class PostselectedOutcome:
    p_ps: float
    raw_state: np.ndarray

    @property
    def passed(self) -> bool:
        return self.p_ps > P_FLOOR

    @property
    def state(self) -> np.ndarray:
        """Renormalized state F|psi>/sqrt(p_ps)."""
        if not self.passed:
            raise VanishingPostselection(f"p_ps = {self.p_ps:.3e} is below {P_FLOOR:g}")
        return self.raw_state / np.sqrt(self.p_ps)


def apply_postselection(psi_theta, ps) -> PostselectedOutcome:
    psi = qcore.as_state(psi_theta)
    ps = as_postselection(ps)
    qcore.check_same_dim(psi, ps.projector)
    raw = ps.projector @ psi
    p = float(np.vdot(psi, raw).real)
    return PostselectedOutcome(max(p, 0.0), raw)


def postselection_probability(rho, F) -> float:
    """Tr(F rho) for a possibly mixed state."""
    rho = qcore.as_operator(rho)
    F = as_postselection(F).projector
    qcore.check_same_dim(rho, F)
    return float(np.trace(F @ rho).real)


def postselected_density(rho, F) -> np.ndarray:
    """F rho F / Tr(F rho)."""
    F = as_postselection(F).projector
    p = postselection_probability(rho, F)
    if p <= P_FLOOR:
        raise VanishingPostselection(f"p_ps = {p:.3e} is below {P_FLOOR:g}")
    return F @ rho @ F / p


def _require_nondegenerate(A):
    if qcore.spectral_range(A) <= 1e-12:
        raise DegenerateGenerator("all generator eigenvalues coincide")


def postselected_qfi(psi0, A, ps, theta: float) -> fisher.FisherReport:
    """QFI of the renormalized postselected state, from the trace forms.

    With rho_theta = |Psi_theta><Psi_theta| and p = Tr(F rho_theta):

        I = (4/p) Tr(F A rho_theta A) - (4/p^2) |Tr(F rho_theta A)|^2

    For a rank-one state the traces reduce to inner products with
    v = F A |Psi> and u = F |Psi>, and the bracket equals the squared norm of
    the part of v orthogonal to u. That form is used: it cannot go negative
    through cancellation when p is small.
    """
    psi0 = qcore.as_state(psi0)
    A = qcore.as_hermitian(A)
    ps = as_postselection(ps)
    qcore.check_same_dim(psi0, A, ps.projector)
    _require_nondegenerate(A)

    psi = qcore.evolve_state(psi0, A, theta)
    F = ps.projector
    Fpsi = F @ psi
    p = float(np.vdot(psi, Fpsi).real)
    if p <= P_FLOOR:
        raise VanishingPostselection(f"p_ps = {p:.3e} at theta={theta!r}")
    v = F @ (A @ psi)
    u = Fpsi / np.sqrt(p)
    r = v - u * np.vdot(u, v)
    return fisher.make_report(4 * np.vdot(r, r).real / p, "closed_form")


def postselected_trace_terms(psi0, A, ps, theta: float):
    """The raw traces ``(p, Tr(F A rho A), Tr(F rho A))`` at ``theta``."""
    psi = qcore.evolve_state(qcore.as_state(psi0), qcore.as_hermitian(A), theta)
    rho = qcore.ket_bra(psi)
    F = as_postselection(ps).projector
    return (float(np.trace(F @ rho).real), float(np.trace(F @ A @ rho @ A).real),
            complex(np.trace(F @ rho @ A)))


def postselected_qfi_fd(psi0, A, ps, theta: float, step: float | None = None) -> fisher.FisherReport:
    """Independent oracle: pure-state QFI of renormalized states, numeric tangent."""
    psi0 = qcore.as_state(psi0)
    A = qcore.as_hermitian(A)
    ps = as_postselection(ps)
    qcore.check_same_dim(psi0, A, ps.projector)
    h = fisher.default_step(theta) if step is None else float(step)

    def renormalized(t):
        return apply_postselection(qcore.evolve_state(psi0, A, t), ps).state

    psi = renormalized(theta)
    dpsi = fisher.central_difference(renormalized, theta, h)
    value = fisher.qfi_pure_tangent(psi, dpsi).value
    return fisher.make_report(value, "finite_difference", step=h)


def postselected_qfi_mixed(rho0, A, ps, theta: float) -> fisher.FisherReport:
    """SLD-based QFI of F rho_theta F / p for a mixed input state."""
    rho0 = qcore.as_density(rho0)
    A = qcore.as_hermitian(A)
    F = as_postselection(ps).projector
    qcore.check_same_dim(rho0, A, F)
    rho = qcore.evolve(rho0, A, theta)
    drho = qcore.evolution_derivative(rho, A)
    p = float(np.trace(F @ rho).real)
    if p <= P_FLOOR:
        raise VanishingPostselection(f"p_ps = {p:.3e} at theta={theta!r}")
    dp = float(np.trace(F @ drho).real)
    rho_ps = F @ rho @ F / p
    drho_ps = F @ drho @ F / p - rho_ps * dp / p
    return fisher.qfi_mixed_sld(rho_ps, drho_ps)
