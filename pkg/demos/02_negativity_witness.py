"""Anomalous postselected information always comes with KD negativity.

Run with ``python3 demos/02_negativity_witness.py``.
"""

import numpy as np

from psmet import kdq, protocols, qcore, theorems

# Take an anomalous instance from the three-level construction.
cfg = protocols.ProtocolConfig((-1, 1, 3), k_index=1, phi=0.05)
A, ps, psi0 = protocols.supp3_construct(cfg)
psi = qcore.evolve_state(psi0, A, cfg.theta)

# The doubly extended KD distribution q[a, a', f] lives on the A
# eigenbasis twice and the eigenbasis of the postselection projector.
kd = kdq.kd_doubly_extended(psi, A, ps.projector)
cond, p = kdq.conditional_kd(kd)
print("p_ps =", p)
print("sum of conditional q =", cond.sum())

# The QFI read off the quasiprobabilities matches the trace form...
print("QFI from KD     :", kdq.qfi_from_kd(kd).value)
print("(Delta a)^2     :", qcore.spectral_range(A) ** 2)

# ...and exceeds (Delta a)^2 only because some entries are negative.
neg = kdq.negativity(kd, None)
print("min real entry  :", neg.min_real)
print("negativity mass :", neg.negativity_mass)

# With A and F commuting, the tensor collapses to an ordinary
# probability distribution and no anomaly is possible.
A_c, F_c, psi_c = qcore.random_instance(4, seed=3, commuting=True)
kd_c = kdq.kd_doubly_extended(psi_c, A_c, F_c)
print("\ncommuting case classical:", kdq.negativity(kd_c, None).is_classical)

# Sweep a few hundred random instances of each kind.
t1 = theorems.theorem1_suite(300, 4, seed=0)
print("commuting instances   :", t1.as_dict())
t2 = theorems.theorem2_search(1000, 3, seed=0)
print("noncommuting, anomalies:", t2.anomalies, "violations:", t2.violations,
      "least negative min_real:", t2.max_min_real)

# Weak values outside the eigenvalue range are the same phenomenon seen
# through a single (a, f) pair.
zero, minus = np.array([1, 0]), np.array([1, -1]) / np.sqrt(2)
psi2 = np.array([np.cos(0.7), np.sin(0.7)])
print("\nweak value of |0><0| postselected on |->:", kdq.weak_value(zero, minus, psi2))
