"""Algebraic classification tools."""
from .essential import essential_tuples, is_essential, is_essential_by_rho_tilde, rho_tilde
from .families import (FAMILIES, FamilyReport, check_family_preservation, invariant_relations,
                       make_family_op)
from .hubie import HubieSearch, find_hubie_pol, is_generalized_hubie_pol, is_hubie_pol
from .paths import is_loop_connected, is_quasi_loop_connected, path_structure
from .projective import (PGPVerdict, classify_pgp_egp, is_alpha_beta_projective,
                         projective_coordinates, valid_pairs)
from .shops import Shop, has_simple_A_she, is_she, zero_collapsible_from_source
from .zhuk import (LEMMA_FUN, ZHUK_REGIMES, TermSearch, ZhukResult, check_zhuk_condition,
                   find_lemma_fun_witnesses, find_term)

__all__ = [
    "essential_tuples", "is_essential", "is_essential_by_rho_tilde", "rho_tilde", "FAMILIES",
    "FamilyReport", "check_family_preservation", "invariant_relations", "make_family_op",
    "HubieSearch", "find_hubie_pol", "is_generalized_hubie_pol", "is_hubie_pol",
    "is_loop_connected", "is_quasi_loop_connected", "path_structure", "PGPVerdict",
    "classify_pgp_egp", "is_alpha_beta_projective", "projective_coordinates", "valid_pairs",
    "Shop", "has_simple_A_she", "is_she", "zero_collapsible_from_source", "LEMMA_FUN",
    "ZHUK_REGIMES", "TermSearch", "ZhukResult", "check_zhuk_condition",
    "find_lemma_fun_witnesses", "find_term",
]
