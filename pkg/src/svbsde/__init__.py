"""Set-valued backward stochastic differential equations on a binomial tree.

Convex compact sets are :class:`ConvexBody` polytopes (intervals in one
dimension, polygons in two). Set-valued random variables live on the atoms
of a symmetric random-walk filtration; integrals, martingale
representations and a Picard solver are built on top.
"""
from .bsde import (
    AffineDriver,
    BSDEProblem,
    BSDESolution,
    ConstantDriver,
    ConvergenceWarning,
    Diagnostics,
    build_martingale_term,
    contraction_diagnostics,
    solve_condexp_form,
    solve_integral_form,
    uniqueness_probe,
)
from .convex import (
    ConvexBody,
    body_norm,
    hausdorff_distance,
    hukuhara_difference,
    minkowski_sum,
    support,
)
from .integrals import (
    ProcessFamily,
    RepresenterSet,
    aumann_time_integral,
    extended_integral,
    generalized_ito_integral,
    set_ito_integral,
)
from .martingale import SetMartingale, build_representers, martingale_selectors, reconstruct_integral
from .setrv import (
    EnumerationCapExceeded,
    NotExists,
    SetProcess,
    SetRV,
    aumann_expectation,
    conditional_expectation_set,
    hukuhara_set_rv,
)
from .tree import FiltrationTree, VectorProcess, VectorRV, build_tree, martingale_representer

__all__ = [
    "AffineDriver",
    "BSDEProblem",
    "BSDESolution",
    "ConstantDriver",
    "ConvergenceWarning",
    "Diagnostics",
    "build_martingale_term",
    "contraction_diagnostics",
    "solve_condexp_form",
    "solve_integral_form",
    "uniqueness_probe",
    "ConvexBody",
    "body_norm",
    "hausdorff_distance",
    "hukuhara_difference",
    "minkowski_sum",
    "support",
    "ProcessFamily",
    "RepresenterSet",
    "aumann_time_integral",
    "extended_integral",
    "generalized_ito_integral",
    "set_ito_integral",
    "SetMartingale",
    "build_representers",
    "martingale_selectors",
    "reconstruct_integral",
    "EnumerationCapExceeded",
    "NotExists",
    "SetProcess",
    "SetRV",
    "aumann_expectation",
    "conditional_expectation_set",
    "hukuhara_set_rv",
    "FiltrationTree",
    "VectorProcess",
    "VectorRV",
    "build_tree",
    "martingale_representer",
]

__version__ = "0.1.0"
