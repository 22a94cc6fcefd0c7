"""Postselection can push the quantum Fisher information past (Delta a)^2.

Run with ``python3 demos/01_divergent_fisher.py``.
"""

import math
from dataclasses import replace

import numpy as np

from psmet import fisher, postselect, protocols, qcore

# Start with the generator A = diag(-1, 1, 3). Without postselection the
# best any input state can do is (Delta a)^2 = 16.
A = np.diag([-1.0, 1.0, 3.0])
best, best_state = fisher.max_qfi(A)
print("max QFI without postselection:", best)

# The three-level construction has one knob phi in the input state and
# depends on how close the prior guess theta0 sits to the true theta.
cfg = protocols.ProtocolConfig((-1, 1, 3), k_index=1, theta0=0.2)

# At delta_theta = 0 the postselected QFI grows like cot(phi)^2 while
# the postselection probability shrinks like sin(phi)^2.
print("\n   phi          p_ps            I_ps        p_ps * I_ps")
for phi in [0.3, 0.1, 0.03, 0.01, 1e-3, 1e-4]:
    qfi, p = protocols.supp3_analytic(replace(cfg, phi=phi))
    print(f"{phi:8.0e} {p:14.4e} {qfi:15.6e} {qfi * p:14.8f}")

# The same number comes out of the explicit states and projector: build
# them and apply the trace formula directly.
A3, ps, psi0 = protocols.supp3_construct(replace(cfg, phi=0.01, delta_theta=1e-4))
direct = postselect.postselected_qfi(psi0, A3, ps, 0.2 + 1e-4).value
closed, _ = protocols.supp3_analytic(replace(cfg, phi=0.01, delta_theta=1e-4))
print(f"\ntrace form {direct:.10e} vs closed form {closed:.10e}")

# Being off by delta_theta caps the gain. Once delta_theta is comparable to
# phi the advantage disappears, so the prior estimate has to be good.
print("\n delta_theta   I_ps at phi = 1e-3")
for d in [0.0, 1e-5, 1e-4, 1e-3, 1e-2]:
    qfi, _ = protocols.supp3_analytic(replace(cfg, phi=1e-3, delta_theta=d))
    print(f"{d:10.0e} {qfi:16.6e}")

# Half the information is thrown away with the rejected trials. The
# four-level construction needs degenerate extreme eigenvalues and loses
# nothing: p_ps * I_ps -> (Delta a)^2.
lossless = protocols.ProtocolConfig((-1, -1, 3, 3))
print("\n   phi     p_ps * I_ps (lossless)")
for phi in [0.3, 0.03, 3e-3, 3e-4]:
    qfi, p = protocols.supp4_analytic(replace(lossless, phi=phi))
    print(f"{phi:8.0e} {qfi * p:16.10f}")

report = protocols.ordered_limits("supp4", lossless)
print("\nordered limits pass:", report.passed, " final product:", report.product[-1])
print("target (Delta a)^2 :", qcore.spectral_range(np.diag(lossless.eigenvalues)) ** 2)
print("cos^2(1e-6) * 16  :", math.cos(1e-6) ** 2 * 16)
