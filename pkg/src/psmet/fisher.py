"""Classical and quantum Fisher information.

Every routine returns a :class:`FisherReport` that records which formula
produced the number, so cross-checks between independent pathways (closed
form, SLD, pure-state tangent, finite differences, quasiprobabilities) can
be asserted on the report itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from . import qcore
from .errors import (
    DegenerateGenerator,
    DimensionMismatch,
    InputError,
    NonpositiveInformation,
    NotAProbability,
    NotTraceless,
    NumericalDomainError,
    SingularOutcome,
)

Method = Literal["closed_form", "sld", "pure_state", "finite_difference", "quasiprobability"]

PROB_FLOOR = 1e-12
SLOPE_FLOOR = 1e-9
SLD_CUTOFF = 1e-12
NEGATIVE_TOL = 1e-9


@dataclass(frozen=True)
class FisherReport:
    value: float
    method: Method
    step: float | None = None
    sld_operator: np.ndarray | None = None

    def __float__(self) -> float:
        return self.value


def make_report(value, method: Method, step=None, sld_operator=None,
                scale: float = 1.0) -> FisherReport:
    """Build a report, clamping rounding-level negatives to zero.

    ``scale`` is the magnitude of the terms that cancelled to give
    ``value``; negatives down to -1e-9 * max(1, scale) count as rounding.
    """
    value = float(value)
    if value < -NEGATIVE_TOL * max(1.0, scale):
        raise NumericalDomainError(f"Fisher information came out negative ({value:.3e})")
    return FisherReport(max(value, 0.0), method, step, sld_operator)


def default_step(theta: float) -> float:
    return 1e-5 * max(1.0, abs(theta))


def central_difference(f: Callable, theta: float, step: float, richardson: bool = False):
    """Central difference of ``f`` at ``theta``; optional one-level Richardson."""
    d = (f(theta + step) - f(theta - step)) / (2 * step)
    if richardson:
        h = step / 2
        d2 = (f(theta + h) - f(theta - h)) / (2 * h)
        d = (4 * d2 - d) / 3
    return d


# ---------------------------------------------------------------------------
# classical Fisher information
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClassicalModel:
    """Outcome probabilities ``prob(theta)`` of a parameterized experiment."""

    prob: Callable[[float], np.ndarray]
    outcome_count: int

    def __call__(self, theta: float) -> np.ndarray:
        p = np.asarray(self.prob(theta), dtype=float)
        if p.shape != (self.outcome_count,):
            raise NotAProbability(f"expected {self.outcome_count} outcomes, got shape {p.shape}")
        if np.any(p < -PROB_FLOOR) or abs(p.sum() - 1.0) > 1e-10:
            raise NotAProbability(f"not a probability vector at theta={theta!r}: {p}")
        return np.clip(p, 0.0, None)


def projective_model(psi0, A, basis) -> ClassicalModel:
    """Born-rule model: evolve ``psi0`` under ``A`` and measure ``basis`` columns."""
    psi0 = qcore.as_state(psi0)
    A = qcore.as_hermitian(A)
    basis = np.asarray(basis, dtype=complex)
    qcore.check_same_dim(psi0, A, basis)

    def prob(theta):
        amps = basis.conj().T @ qcore.evolve_state(psi0, A, theta)
        return np.abs(amps) ** 2

    return ClassicalModel(prob, basis.shape[1])


def classical_fisher(model, theta: float, step: float | None = None,
                     richardson: bool = False) -> FisherReport:
    """Sum over outcomes of (dp/dtheta)^2 / p with central-difference slopes.

    Outcomes whose probability sits below 1e-12 contribute nothing when
    their slope is also negligible; otherwise the information diverges and
    :class:`SingularOutcome` is raised.
    """
    if not isinstance(model, ClassicalModel):
        probe = np.asarray(model(theta))
        model = ClassicalModel(model, probe.shape[0])
    h = default_step(theta) if step is None else float(step)
    if h <= 0:
        raise InputError("step must be positive")
    p = model(theta)
    dp = central_difference(model, theta, h, richardson)
    total = 0.0
    for pi, dpi in zip(p, dp):
        if pi < PROB_FLOOR:
            if abs(dpi) >= SLOPE_FLOOR:
                raise SingularOutcome(f"outcome with p={pi:.3e} has slope {dpi:.3e}")
            continue
        total += dpi**2 / pi
    return make_report(total, "finite_difference", step=h)


# ---------------------------------------------------------------------------
# quantum Fisher information
# ---------------------------------------------------------------------------


def qfi_pure_generator(psi0, A) -> FisherReport:
    """4 Var(A) in the input state; independent of theta."""
    psi0 = qcore.as_state(psi0)
    A = qcore.as_hermitian(A)
    qcore.check_same_dim(psi0, A)
    return make_report(4 * qcore.state_variance(psi0, A), "closed_form")


def qfi_pure_tangent(psi, dpsi) -> FisherReport:
    """4<dpsi|dpsi> - 4|<dpsi|psi>|^2 for a normalized state and its tangent."""
    psi = qcore.as_state(psi)
    dpsi = qcore.as_state(dpsi, normalized=False)
    if psi.shape != dpsi.shape:
        raise DimensionMismatch(f"state dim {psi.shape[0]} vs tangent dim {dpsi.shape[0]}")
    value = 4 * np.vdot(dpsi, dpsi).real - 4 * abs(np.vdot(dpsi, psi)) ** 2
    return make_report(value, "pure_state")


def qfi_pure_finite_difference(psi0, A, theta: float = 0.0, step: float | None = None) -> FisherReport:
    """Pure-state QFI with the tangent taken by central differences."""
    psi0 = qcore.as_state(psi0)
    A = qcore.as_hermitian(A)
    h = default_step(theta) if step is None else float(step)
    psi = qcore.evolve_state(psi0, A, theta)
    dpsi = central_difference(lambda t: qcore.evolve_state(psi0, A, t), theta, h)
    rep = qfi_pure_tangent(psi, dpsi)
    return make_report(rep.value, "finite_difference", step=h)


def sld(rho, drho):
    """Symmetric logarithmic derivative in the eigenbasis of ``rho``.

    Returns ``(L, lam, V)`` with ``L`` the full operator. Pairs with
    eigenvalue sum at or below 1e-12 get a zero kernel entry.
    """
    lam, V = np.linalg.eigh(rho)
    D = V.conj().T @ drho @ V
    denom = lam[:, None] + lam[None, :]
    K = np.zeros_like(D)
    mask = denom > SLD_CUTOFF
    K[mask] = 2 * D[mask] / denom[mask]
    return V @ K @ V.conj().T, lam, V


def qfi_mixed_sld(rho, drho) -> FisherReport:
    """Tr(rho L^2) with L the symmetric logarithmic derivative of ``drho``."""
    rho = qcore.as_hermitian(rho)
    drho = qcore.as_hermitian(drho)
    qcore.check_same_dim(rho, drho)
    tr = np.trace(drho)
    if abs(tr) > 1e-9:
        raise NotTraceless(f"Tr(drho) = {tr:.3e}")
    L, _, _ = sld(rho, drho)
    value = np.trace(rho @ L @ L).real
    return make_report(value, "sld", sld_operator=L)


def max_qfi(A):
    """Optimal-input QFI (spectral range squared) and the state achieving it."""
    es = qcore.eig_hermitian(A)
    delta = es.values[-1] - es.values[0]
    if delta <= 1e-12:
        raise DegenerateGenerator("all generator eigenvalues coincide; theta is not imprinted")
    state = (es.vectors[:, 0] + es.vectors[:, -1]) / np.sqrt(2)
    return float(delta**2), state


def cramer_rao_bound(fisher_value: float, trials: int = 1) -> float:
    """Lower bound 1/(N I) on the variance of an unbiased estimator."""
    if not fisher_value > 0:
        raise NonpositiveInformation(f"Fisher information must be positive, got {fisher_value!r}")
    if trials < 1:
        raise InputError(f"trials must be >= 1, got {trials!r}")
    return 1.0 / (trials * fisher_value)
