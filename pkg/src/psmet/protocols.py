"""Divergent postselected-QFI constructions and their closed forms.

Two protocols are provided:

``supp3``
    Any generator with at least three eigenvalues. Uses |a_min>, |a_k>,
    |a_max> and a rank-two postselection. The postselected QFI diverges in
    the ordered limit (delta_theta -> 0, then phi -> 0) while p_ps times the
    QFI tends to (Delta a)^2 / 2, so half of the information is discarded.

``supp4``
    Generator whose extreme eigenvalues are both doubly degenerate. The QFI
    diverges while p_ps times the QFI tends to (Delta a)^2: nothing is lost.

The closed forms are evaluated with cos(x) rewritten as 1 - 2 sin^2(x/2)
where that removes cancellation. The rewrite is exact algebra, so the
results coincide with the textbook expressions away from the limits and
stay accurate down to phi ~ 1e-7.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Literal, Sequence

import numpy as np

from . import postselect, qcore
from .errors import DivergentInformation, InvalidConfig, LimitMismatch, PsmetError

Protocol = Literal["supp3", "supp4"]

DENOM_FLOOR = 1e-14
SWEEP_HEADER = ("phi", "delta_theta", "p_ps", "qfi_ps", "qfi_ps_numeric",
                "qfi_times_pps", "qfi_times_var")


@dataclass(frozen=True)
class ProtocolConfig:
    eigenvalues: tuple[float, ...]
    k_index: int = 1
    theta0: float = 0.0
    phi: float = 0.0
    delta_theta: float = 0.0
    var_theta0: float = 1e-6

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", tuple(float(a) for a in self.eigenvalues))

    @property
    def delta_a(self) -> float:
        return self.eigenvalues[-1] - self.eigenvalues[0]

    @property
    def theta(self) -> float:
        return self.theta0 + self.delta_theta


def _validate_common(cfg: ProtocolConfig):
    a = np.asarray(cfg.eigenvalues)
    if a.size < 2 or np.any(np.diff(a) < 0):
        raise InvalidConfig(f"eigenvalues must be listed in ascending order: {cfg.eigenvalues}")
    if a[-1] - a[0] <= 1e-12:
        raise InvalidConfig("eigenvalues are all identical")
    if not cfg.var_theta0 > 0:
        raise InvalidConfig("var_theta0 must be positive")
    for name in ("theta0", "phi", "delta_theta"):
        if not math.isfinite(getattr(cfg, name)):
            raise InvalidConfig(f"{name} must be finite")


def validate_supp3(cfg: ProtocolConfig):
    _validate_common(cfg)
    M = len(cfg.eigenvalues)
    if M < 3:
        raise InvalidConfig(f"supp3 needs at least 3 eigenvalues, got {M}")
    if not 0 < cfg.k_index < M - 1:
        raise InvalidConfig(f"k_index must lie strictly between 0 and {M - 1}")


def validate_supp4(cfg: ProtocolConfig):
    _validate_common(cfg)
    a = cfg.eigenvalues
    if len(a) < 4:
        raise InvalidConfig(f"supp4 needs at least 4 eigenvalues, got {len(a)}")
    if a[0] != a[1] or a[-2] != a[-1]:
        raise InvalidConfig("supp4 needs doubly degenerate minimum and maximum eigenvalues")


def validate(protocol: Protocol, cfg: ProtocolConfig):
    if protocol == "supp3":
        validate_supp3(cfg)
    elif protocol == "supp4":
        validate_supp4(cfg)
    else:
        raise InvalidConfig(f"unknown protocol {protocol!r}")


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------


def supp3_construct(cfg: ProtocolConfig):
    """Return ``(A, Postselection, psi0)`` with A diagonal in the computational basis."""
    validate_supp3(cfg)
    a = np.asarray(cfg.eigenvalues)
    M = len(a)
    e = np.eye(M, dtype=complex)
    lo, hi, k = e[0], e[M - 1], e[cfg.k_index]
    r2 = np.sqrt(2.0)

    f1 = (hi + lo) / r2
    f2 = (1j * (hi - lo) / r2 + k) / r2
    c, s = np.cos(cfg.phi), np.sin(cfg.phi)
    psi = ((c - s) * 1j * (lo - hi) / r2 + (c + s) * k) / r2

    A = np.diag(a).astype(complex)
    psi0 = qcore.evolve_state(psi, A, -cfg.theta0)
    return A, postselect.Postselection.from_vectors(np.column_stack([f1, f2])), psi0


def supp4_construct(cfg: ProtocolConfig):
    """Return ``(A, Postselection, psi0)`` in the minimal four-level embedding.

    Basis order is (a_min_1, a_min_2, a_max_2, a_max_1) with eigenvalues
    (a_min, a_min, a_max, a_max).
    """
    validate_supp4(cfg)
    amin, amax = cfg.eigenvalues[0], cfg.eigenvalues[-1]
    e = np.eye(4, dtype=complex)
    min1, min2, max2, max1 = e
    r2 = np.sqrt(2.0)

    f1 = (max2 - min1) / r2
    f2 = (min2 - max1) / r2
    c, s = np.cos(cfg.phi), np.sin(cfg.phi)
    psi = 0.5 * ((c - s) * (max2 + min2) + (s + c) * (max1 + min1))

    A = np.diag([amin, amin, amax, amax]).astype(complex)
    psi0 = qcore.evolve_state(psi, A, -cfg.theta0)
    return A, postselect.Postselection.from_vectors(np.column_stack([f1, f2])), psi0


def construct(protocol: Protocol, cfg: ProtocolConfig):
    return supp3_construct(cfg) if protocol == "supp3" else supp4_construct(cfg)


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------


def _hav(x):
    # 1 - cos(x) without cancellation
    return 2.0 * math.sin(0.5 * x) ** 2


def supp3_analytic(cfg: ProtocolConfig):
    """Closed-form ``(qfi_ps, p_ps)`` for the three-eigenvalue construction."""
    validate_supp3(cfg)
    a1, ak, aM = cfg.eigenvalues[0], cfg.eigenvalues[cfg.k_index], cfg.eigenvalues[-1]
    phi, d = cfg.phi, cfg.delta_theta
    span, upper, lower = aM - a1, aM - ak, ak - a1

    h_upper, h_lower, h_span = _hav(upper * d), _hav(lower * d), _hav(span * d)
    sin_phi = math.sin(phi)
    cos2, cos4, sin4 = math.cos(2 * phi), math.cos(4 * phi), math.sin(4 * phi)
    one_minus_sin2 = (math.cos(phi) - sin_phi) ** 2

    # the braced factor shared by the QFI and p_ps
    denom = 8 * sin_phi**2 + 2 * cos2 * (h_upper + h_lower) + one_minus_sin2 * h_span
    if denom < DENOM_FLOOR:
        raise DivergentInformation(f"denominator {denom:.3e} at phi={phi!r}, delta_theta={d!r}")
    g = lower * h_upper + upper * h_lower
    numer = (4 * span**2 * sin_phi**2 * one_minus_sin2
             - upper * lower * (1 + cos4) * h_span
             + span * (2 * cos2 - sin4) * g)
    return 8 * numer / denom**2, denom / 8


def supp4_analytic(cfg: ProtocolConfig):
    """Closed-form ``(qfi_ps, p_ps)`` for the degenerate-extremes construction."""
    validate_supp4(cfg)
    span = cfg.delta_a
    phi = cfg.phi
    # 1 - cos(2 phi) cos(span delta_theta)
    denom = 2 * math.sin(phi) ** 2 + math.cos(2 * phi) * _hav(span * cfg.delta_theta)
    if denom < DENOM_FLOOR:
        raise DivergentInformation(f"denominator {denom:.3e} at phi={phi!r}")
    return math.sin(2 * phi) ** 2 * span**2 / denom**2, denom / 2


def analytic(protocol: Protocol, cfg: ProtocolConfig):
    return supp3_analytic(cfg) if protocol == "supp3" else supp4_analytic(cfg)


def numeric(protocol: Protocol, cfg: ProtocolConfig):
    """``(qfi_ps, p_ps)`` from the constructed instance via the trace forms."""
    A, ps, psi0 = construct(protocol, cfg)
    theta = cfg.theta
    out = postselect.apply_postselection(qcore.evolve_state(psi0, A, theta), ps)
    return postselect.postselected_qfi(psi0, A, ps, theta).value, out.p_ps


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    phi: float
    delta_theta: float
    p_ps: float | None
    qfi_ps: float | None
    qfi_ps_numeric: float | None
    qfi_times_pps: float | None
    qfi_times_var: float | None
    error: str | None = None

    def as_tuple(self):
        return tuple(getattr(self, name) for name in SWEEP_HEADER)


def _cell(protocol, cfg):
    try:
        qfi, p = analytic(protocol, cfg)
    except PsmetError as exc:
        return SweepRow(cfg.phi, cfg.delta_theta, None, None, None, None, None,
                        f"{type(exc).__name__}: {exc}")
    try:
        qfi_num, _ = numeric(protocol, cfg)
    except PsmetError as exc:
        return SweepRow(cfg.phi, cfg.delta_theta, p, qfi, None, qfi * p, qfi * cfg.var_theta0,
                        f"{type(exc).__name__}: {exc}")
    return SweepRow(cfg.phi, cfg.delta_theta, p, qfi, qfi_num, qfi * p, qfi * cfg.var_theta0)


def sweep(protocol: Protocol, cfg_base: ProtocolConfig,
          phi_grid: Sequence[float], dtheta_grid: Sequence[float]) -> list[SweepRow]:
    """Evaluate every (phi, delta_theta) cell, phi in the outer loop.

    Per-cell failures (divergent closed form, vanishing postselection) are
    recorded in ``SweepRow.error`` with the affected fields left as None.
    """
    validate(protocol, cfg_base)
    if len(phi_grid) == 0 or len(dtheta_grid) == 0:
        raise InvalidConfig("sweep grids must be nonempty")
    return [_cell(protocol, replace(cfg_base, phi=float(phi), delta_theta=float(d)))
            for phi in phi_grid for d in dtheta_grid]


# ---------------------------------------------------------------------------
# ordered limits
# ---------------------------------------------------------------------------

DTHETA_SEQUENCE = tuple(10.0**-k for k in range(2, 9))
PHI_SEQUENCE = tuple(10.0**-k for k in range(1, 7))


@dataclass
class LimitsReport:
    protocol: str
    delta_a: float
    expected_product: float
    phis: list[float] = field(default_factory=list)
    p_ps: list[float] = field(default_factory=list)
    qfi_ps: list[float] = field(default_factory=list)
    product: list[float] = field(default_factory=list)
    inner_errors: list[list[float]] = field(default_factory=list)
    diverges: bool = False
    passed: bool = False

    def as_dict(self) -> dict:
        return {
            "protocol": self.protocol,
            "delta_a": self.delta_a,
            "expected_product": self.expected_product,
            "phi": self.phis,
            "p_ps": self.p_ps,
            "qfi_ps": self.qfi_ps,
            "product": self.product,
            "diverges": self.diverges,
            "passed": self.passed,
        }


def inner_limit(protocol: Protocol, cfg: ProtocolConfig):
    """Closed-form delta_theta -> 0 limits ``(p_ps, qfi_ps, product)`` at ``cfg.phi``."""
    phi, da2 = cfg.phi, cfg.delta_a**2
    p = math.sin(phi) ** 2
    if protocol == "supp3":
        qfi = (1 / math.tan(phi) - 1) ** 2 / 2 * da2
        prod = 0.5 * (1 - math.sin(2 * phi)) * da2
    else:
        qfi = da2 / math.tan(phi) ** 2
        prod = math.cos(phi) ** 2 * da2
    return p, qfi, prod


def ordered_limits(protocol: Protocol, cfg: ProtocolConfig,
                   dtheta_seq: Sequence[float] = DTHETA_SEQUENCE,
                   phi_seq: Sequence[float] = PHI_SEQUENCE,
                   rtol: float | None = None) -> LimitsReport:
    """Take delta_theta -> 0 first, then phi -> 0, on the closed forms.

    For each phi the delta_theta sequence must approach the delta_theta = 0
    value monotonically, and that value must equal the stated inner limits.
    Along phi the postselection probability must fall towards zero, the
    QFI must grow monotonically past 1e6, and p_ps times the QFI must reach
    (Delta a)^2 / 2 (supp3) or (Delta a)^2 (supp4) within ``rtol`` at the
    last phi. Raises :class:`LimitMismatch` on any failure.
    """
    validate(protocol, cfg)
    da2 = cfg.delta_a**2
    target = 0.5 * da2 if protocol == "supp3" else da2
    rtol = (1e-4 if protocol == "supp3" else 1e-6) if rtol is None else rtol
    rep = LimitsReport(protocol, cfg.delta_a, target)

    for phi in phi_seq:
        at = replace(cfg, phi=phi)
        q0, p0 = analytic(protocol, replace(at, delta_theta=0.0))
        lim_p, lim_q, lim_prod = inner_limit(protocol, at)
        for name, got, want in (("p_ps", p0, lim_p), ("qfi_ps", q0, lim_q),
                                ("product", q0 * p0, lim_prod)):
            if abs(got - want) > 1e-9 * max(1.0, abs(want)):
                raise LimitMismatch(f"{protocol} inner limit of {name} at phi={phi:g}: "
                                    f"{got!r} != {want!r}", [got, want])
        errs = [abs(analytic(protocol, replace(at, delta_theta=d))[0] - q0) / q0
                for d in dtheta_seq]
        # far from the limit (delta_theta >> phi) the QFI is not monotone in
        # delta_theta; demand monotone approach only once within 50%.
        # The slack absorbs rounding once the error sits at machine precision.
        tail = [x for i, x in enumerate(errs) if min(errs[: i + 1]) < 0.5]
        if (not tail or errs[-1] > 1e-3
                or any(b > a + 1e-13 for a, b in zip(tail, tail[1:]))):
            raise LimitMismatch(f"{protocol} delta_theta sequence at phi={phi:g} "
                                "does not settle", errs)
        rep.phis.append(phi)
        rep.p_ps.append(p0)
        rep.qfi_ps.append(q0)
        rep.product.append(q0 * p0)
        rep.inner_errors.append(errs)

    if any(b >= a for a, b in zip(rep.p_ps, rep.p_ps[1:])) or rep.p_ps[-1] > 1e-10:
        raise LimitMismatch(f"{protocol} p_ps does not approach 0", rep.p_ps)
    rep.diverges = all(b > a for a, b in zip(rep.qfi_ps, rep.qfi_ps[1:])) and rep.qfi_ps[-1] > 1e6
    if not rep.diverges:
        raise LimitMismatch(f"{protocol} QFI does not grow without bound", rep.qfi_ps)
    if abs(rep.product[-1] - target) > rtol * target:
        raise LimitMismatch(f"{protocol} p_ps * QFI -> {rep.product[-1]!r}, expected {target!r}",
                            rep.product)
    rep.passed = True
    return rep
