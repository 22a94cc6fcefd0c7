"""Fisher information, postselection and Kirkwood-Dirac quasiprobabilities
for finite-dimensional quantum metrology."""

from . import costrate, fisher, io, kdq, postselect, protocols, qcore, theorems
from .costrate import CostModel, breakeven, ps_rate, rate
from .fisher import (
    ClassicalModel,
    FisherReport,
    classical_fisher,
    cramer_rao_bound,
    max_qfi,
    projective_model,
    qfi_mixed_sld,
    qfi_pure_finite_difference,
    qfi_pure_generator,
    qfi_pure_tangent,
)
from .kdq import (
    KDTensor,
    NegativityReport,
    conditional_kd,
    kd_doubly_extended,
    kd_standard,
    negativity,
    pure_factorization_residual,
    qfi_from_kd,
    reconstruct_rho,
    weak_value,
)
from .postselect import (
    Postselection,
    PostselectedOutcome,
    apply_postselection,
    postselected_qfi,
    postselected_qfi_fd,
    postselected_qfi_mixed,
)
from .protocols import (
    ProtocolConfig,
    SweepRow,
    ordered_limits,
    supp3_analytic,
    supp3_construct,
    supp4_analytic,
    supp4_construct,
    sweep,
)
from .qcore import (
    Eigensystem,
    eig_hermitian,
    evolve,
    evolve_state,
    random_instance,
    spectral_range,
    variance,
)

__version__ = "0.1.0"
