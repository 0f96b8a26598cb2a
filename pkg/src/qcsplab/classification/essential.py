"""Essential relations, checked two ways."""
from __future__ import annotations

import itertools

from ..core.relations import Relation


def essential_tuples(R: Relation, size: int) -> list[tuple]:
    """Non-members that can be repaired at every coordinate. Unary relations have none."""
    if R.arity <= 1:
        return []
    out = []
    for t in itertools.product(range(size), repeat=R.arity):
        if t in R.tuples:
            continue
        if all(any(t[:i] + (b,) + t[i + 1:] in R.tuples for b in range(size))
               for i in range(R.arity)):
            out.append(t)
    return out


def rho_tilde(R: Relation, size: int) -> Relation:
    """Conjunction of the projections of R that forget one coordinate each."""
    if R.arity <= 1:
        return R
    projs = []
    for i in range(R.arity):
        projs.append({t[:i] + t[i + 1:] for t in R.tuples})
    ts = [t for t in itertools.product(range(size), repeat=R.arity)
          if all(t[:i] + t[i + 1:] in projs[i] for i in range(R.arity))]
    return Relation(R.arity, ts)


def is_essential(R: Relation, size: int) -> bool:
    return bool(essential_tuples(R, size))


def is_essential_by_rho_tilde(R: Relation, size: int) -> bool:
    return rho_tilde(R, size) != R
