"""Reductions: QCSP to CSP, the hardness gadgets, and the co-NP evaluator."""
from .conp import check_closure, conp_eval, find_canon, is_canon
from .csp import CSPInstance, qcsp_to_csp, solve_csp_instance
from .gadgets import (ALPHA, BETA, NAEInstance, PPDefinition, PPReport, block_relation,
                      nae_satisfiable, naesat_complement_reduction, pp_define_tau_in_sigma,
                      pp_definition, sigma_k, tau_k, tau_structure, tuple_count)
from .nu import NUReport, near_unanimity_for_reduct

__all__ = [
    "check_closure", "conp_eval", "find_canon", "is_canon", "CSPInstance", "qcsp_to_csp",
    "solve_csp_instance", "ALPHA", "BETA", "NAEInstance", "PPDefinition", "PPReport",
    "block_relation", "nae_satisfiable", "naesat_complement_reduction",
    "pp_define_tau_in_sigma", "pp_definition", "sigma_k", "tau_k", "tau_structure",
    "tuple_count", "NUReport", "near_unanimity_for_reduct",
]
