"""Minimally supported feedback filters for exponentially accurate sigma-delta modulation."""

from .chebyshev import cheb_t, cheb_u, critical_point_products, second_kind_zeros
from .filters import (
    FilterDesign,
    SparseFilter,
    design_filter,
    filter_coefficients,
    g_from_h,
    h_from_design,
    minimal_subordinate_sequence,
    optimality_ratio,
)
from .modulator import Alphabet, ModulatorTrace, canonical_state, run_greedy, stability_margin
from .rates import log2_error_bound, multilevel_table, optimize_order
from .reconstruction import SignalSpec, design_kernel, eval_signal, reconstruct, sup_error
from .relaxed import (
    RelaxedSolution,
    constraint_f,
    gamma_from_sigma,
    relaxed_minimizer,
    sigma_from_gamma,
    solve_beta,
)

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "FilterDesign",
    "ModulatorTrace",
    "RelaxedSolution",
    "SignalSpec",
    "SparseFilter",
    "canonical_state",
    "cheb_t",
    "cheb_u",
    "constraint_f",
    "critical_point_products",
    "design_filter",
    "design_kernel",
    "eval_signal",
    "filter_coefficients",
    "g_from_h",
    "gamma_from_sigma",
    "h_from_design",
    "log2_error_bound",
    "minimal_subordinate_sequence",
    "multilevel_table",
    "optimality_ratio",
    "optimize_order",
    "reconstruct",
    "relaxed_minimizer",
    "run_greedy",
    "second_kind_zeros",
    "sigma_from_gamma",
    "solve_beta",
    "stability_margin",
    "sup_error",
]
