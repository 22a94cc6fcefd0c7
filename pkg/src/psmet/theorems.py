"""Randomized checks of the two bounds on postselected Fisher information.

Commuting generator and postselection: the postselected QFI never exceeds
(Delta a)^2 and the conditional KD distribution is a genuine probability
distribution. Anomalous QFI (above (Delta a)^2): the conditional KD
distribution must have a negative entry.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import kdq, postselect, protocols, qcore
from .errors import VanishingPostselection

BOUND_ATOL = 1e-8
ANOMALY_RTOL = 1e-6


@dataclass(frozen=True)
class InstanceCheck:
    delta_a_sq: float
    qfi_ps: float
    p_ps: float
    negativity: kdq.NegativityReport

    @property
    def ratio(self) -> float:
        return self.qfi_ps / self.delta_a_sq

    @property
    def anomalous(self) -> bool:
        return self.qfi_ps > self.delta_a_sq * (1 + ANOMALY_RTOL)


def check_instance(A, F, psi0, theta: float = 0.0) -> InstanceCheck:
    """Postselected QFI and conditional-KD negativity of one instance."""
    ps = postselect.as_postselection(F)
    qfi = postselect.postselected_qfi(psi0, A, ps, theta).value
    psi = qcore.evolve_state(psi0, A, theta)
    kd = kdq.kd_doubly_extended(psi, A, ps.projector)
    neg = kdq.negativity(kd, None)
    p = float(np.vdot(psi, ps.projector @ psi).real)
    return InstanceCheck(qcore.spectral_range(A) ** 2, qfi, p, neg)


def instance_seeds(seed: int, trials: int) -> list[int]:
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(trials)]


@dataclass
class Theorem1Summary:
    trials: int
    dim: int
    seed: int
    violations: int = 0
    nonclassical: int = 0
    skipped: int = 0
    max_ratio: float = 0.0

    def as_dict(self) -> dict:
        return {"theorem": 1, "trials": self.trials, "dim": self.dim, "seed": self.seed,
                "violations": self.violations, "nonclassical": self.nonclassical,
                "skipped": self.skipped, "max_ratio": self.max_ratio}


def theorem1_suite(trials: int, dim: int, seed: int) -> Theorem1Summary:
    """Commuting random instances: bound holds and KD is classical."""
    out = Theorem1Summary(trials, dim, seed)
    for s in instance_seeds(seed, trials):
        A, F, psi0 = qcore.random_instance(dim, s, commuting=True)
        try:
            chk = check_instance(A, F, psi0)
        except VanishingPostselection:
            out.skipped += 1
            continue
        out.max_ratio = max(out.max_ratio, chk.ratio)
        bound_ok = chk.qfi_ps <= chk.delta_a_sq + BOUND_ATOL
        if not chk.negativity.is_classical:
            out.nonclassical += 1
        if not bound_ok or not chk.negativity.is_classical:
            out.violations += 1
    return out


@dataclass
class Theorem2Summary:
    trials: int
    dim: int
    seed: int
    anomalies: int = 0
    violations: int = 0
    skipped: int = 0
    max_min_real: float | None = None
    anomaly_min_real: list[float] = field(default_factory=list)

    def record(self, chk: InstanceCheck):
        if not chk.anomalous:
            return
        self.anomalies += 1
        m = chk.negativity.min_real
        self.anomaly_min_real.append(m)
        self.max_min_real = m if self.max_min_real is None else max(self.max_min_real, m)
        if not m < 0:
            self.violations += 1

    def as_dict(self) -> dict:
        return {"theorem": 2, "trials": self.trials, "dim": self.dim, "seed": self.seed,
                "anomalies": self.anomalies, "violations": self.violations,
                "skipped": self.skipped, "max_min_real": self.max_min_real,
                "anomaly_min_real": self.anomaly_min_real}


def theorem2_search(trials: int, dim: int, seed: int) -> Theorem2Summary:
    """Random noncommuting instances; every anomaly must carry negativity."""
    out = Theorem2Summary(trials, dim, seed)
    for s in instance_seeds(seed, trials):
        A, F, psi0 = qcore.random_instance(dim, s, commuting=False)
        try:
            out.record(check_instance(A, F, psi0))
        except VanishingPostselection:
            out.skipped += 1
    return out


def constructed_instances(count: int, seed: int):
    """Yield ``(A, F, psi0, theta)`` from both divergent constructions.

    Eigenvalues, phi, theta0 and delta_theta are drawn at random and the
    whole instance is conjugated by a Haar-random unitary, so A and F are
    generally not diagonal. Most draws are anomalous by design.
    """
    rng = np.random.default_rng(seed)
    for i in range(count):
        protocol = "supp3" if i % 2 == 0 else "supp4"
        if protocol == "supp3":
            M = int(rng.integers(3, 6))
            eigs = np.sort(rng.uniform(-3, 3, size=M))
            cfg = protocols.ProtocolConfig(tuple(eigs), k_index=int(rng.integers(1, M - 1)))
        else:
            lo, hi = np.sort(rng.uniform(-3, 3, size=2))
            cfg = protocols.ProtocolConfig((lo, lo, hi, hi))
        cfg = replace(cfg, phi=float(rng.uniform(0.002, 0.3)),
                      theta0=float(rng.uniform(-np.pi, np.pi)),
                      delta_theta=float(rng.uniform(-0.02, 0.02)))
        A, ps, psi0 = protocols.construct(protocol, cfg)
        W = qcore.haar_unitary(A.shape[0], rng)
        yield (W @ A @ W.conj().T, W @ ps.projector @ W.conj().T, W @ psi0, cfg.theta)
