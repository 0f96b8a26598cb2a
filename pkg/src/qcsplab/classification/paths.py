"""Reflexive-loop paths P_beta and the quasi-loop-connected pattern."""
from __future__ import annotations

from ..budget import InputError
from ..core.relations import Relation
from ..core.structures import Structure


def _bits(beta: str) -> str:
    if any(c not in "01" for c in beta):
        raise InputError("beta must be a 0/1 string")
    return beta


def is_quasi_loop_connected(beta: str) -> bool:
    """Either 0^a 1^b alpha with b > 0 and |alpha| = a, or 0^a alpha with |alpha| in {a, a-1}."""
    beta = _bits(beta)
    L = len(beta)
    for a in range(L + 1):
        if beta[:a] != "0" * a:
            break
        rest = L - a
        if rest in (a, a - 1):
            return True
        for b in range(1, rest + 1):
            if beta[a + b - 1] != "1":
                break
            if rest - b == a:
                return True
    return False


def is_loop_connected(beta: str) -> bool:
    """The looped vertices form one contiguous block (a path has no other connections)."""
    beta = _bits(beta)
    return "1" in beta and "0" not in beta.strip("0")


def path_structure(beta: str) -> Structure:
    """Vertices 0..L-1, edges i~i+1 both ways, a loop at i when beta_i = 1."""
    beta = _bits(beta)
    if not beta:
        raise InputError("beta must be nonempty")
    L = len(beta)
    edges = set()
    for i in range(L - 1):
        edges |= {(i, i + 1), (i + 1, i)}
    edges |= {(i, i) for i, c in enumerate(beta) if c == "1"}
    return Structure(L, {"E": Relation(2, sorted(edges))})
