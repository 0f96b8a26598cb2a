"""Structures, relations, operations and the shared search engine."""
from .relations import And, Atom, Or, Relation, RelationExpr, materialize, parse_expr, relation_from_text
from .structures import (Domain, Operation, Structure, dump_structure, flatten, parse_structure,
                         power, unflatten)
from .ops import (ClosureResult, closure, find_near_unanimity, find_polymorphism, is_near_unanimity,
                  polymorphisms, preserves, preserves_bruteforce, preserves_dp, preserves_structure,
                  subpower_full_nu, term_closure, term_operation)
from .solver import CSP

__all__ = [
    "And", "Atom", "Or", "Relation", "RelationExpr", "materialize", "parse_expr", "relation_from_text",
    "Domain", "Operation", "Structure", "dump_structure", "flatten", "parse_structure", "power",
    "unflatten", "ClosureResult", "closure", "find_near_unanimity", "find_polymorphism",
    "is_near_unanimity", "polymorphisms", "preserves", "preserves_bruteforce", "preserves_dp",
    "preserves_structure", "subpower_full_nu", "term_closure", "term_operation", "CSP",
]
