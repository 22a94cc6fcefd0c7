"""Information-per-cost rates with and without postselection.

With per-trial costs C_P (preparation), C_M (final measurement) and C_ps
(postselection), N trials give

    R    = N I / (N C_P + N C_M)                 = I / (C_P + C_M)
    R_ps = N p I_ps / (N C_P + N C_ps + N p C_M) = p I_ps / (C_P + C_ps + p C_M)

so the trial count cancels in both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InputError, InvalidProbability


@dataclass(frozen=True)
class CostModel:
    c_prepare: float
    c_measure: float
    c_postselect: float = 0.0
    trials: int = 1

    def __post_init__(self):
        for name in ("c_prepare", "c_measure", "c_postselect"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise InputError(f"{name} must be finite, got {v!r}")
        if not self.c_prepare > 0 or not self.c_measure > 0:
            raise InputError("preparation and measurement costs must be positive")
        if self.c_postselect < 0:
            raise InputError("postselection cost must be nonnegative")
        if int(self.trials) != self.trials or self.trials < 1:
            raise InputError(f"trials must be an integer >= 1, got {self.trials!r}")


def rate(fisher: float, costs: CostModel) -> float:
    if fisher < 0:
        raise InputError("Fisher information must be nonnegative")
    return fisher / (costs.c_prepare + costs.c_measure)


def ps_rate(fisher_ps: float, p_ps: float, costs: CostModel) -> float:
    if not 0 < p_ps <= 1:
        raise InvalidProbability(f"p_ps must lie in (0, 1], got {p_ps!r}")
    if fisher_ps < 0:
        raise InputError("Fisher information must be nonnegative")
    return p_ps * fisher_ps / (costs.c_prepare + costs.c_postselect + p_ps * costs.c_measure)


def breakeven(p_ps: float, costs: CostModel) -> bool:
    """True iff postselection is cheaper than the measurements it saves."""
    if not 0 <= p_ps <= 1:
        raise InvalidProbability(f"p_ps must lie in [0, 1], got {p_ps!r}")
    return costs.c_postselect < (1 - p_ps) * costs.c_measure
