"""When does discarding trials pay off?

Run with ``python3 demos/03_cost_rates.py``.
"""

import math

import numpy as np

from psmet import costrate, fisher, protocols

# Final measurements are expensive (C_M = 1); preparing and postselecting
# are cheap (0.01 each).
costs = costrate.CostModel(c_prepare=0.01, c_measure=1.0, c_postselect=0.01)

# Without postselection the best information per unit cost is
# (Delta a)^2 / (C_P + C_M).
A = np.diag([-1.0, -1.0, 3.0, 3.0])
best, _ = fisher.max_qfi(A)
print("R_max =", costrate.rate(best, costs))

# The lossless construction tuned to p_ps = 1e-4 keeps p_ps * I_ps close to
# (Delta a)^2 while running the expensive detector only on 1 trial in 10^4.
phi = math.asin(math.sqrt(1e-4))
qfi_ps, p_ps = protocols.supp4_analytic(protocols.ProtocolConfig((-1, -1, 3, 3), phi=phi))
print("p_ps =", p_ps, " I_ps =", qfi_ps)
r_ps = costrate.ps_rate(qfi_ps, p_ps, costs)
print("R_ps =", r_ps, " advantage:", r_ps / costrate.rate(best, costs))

# The gain depends only on postselection being cheaper than the
# measurements it saves: C_ps < (1 - p_ps) C_M.
print("\n C_ps    breakeven   R_ps")
for c_ps in [0.001, 0.1, 0.5, 0.9999, 2.0]:
    c = costrate.CostModel(0.01, 1.0, c_ps)
    print(f"{c_ps:6.4f} {costrate.breakeven(p_ps, c)!s:>9} {costrate.ps_rate(qfi_ps, p_ps, c):10.3f}")
