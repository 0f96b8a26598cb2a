"""Bounded term searches for the Zhuk Condition and the binary witnesses p1, p2.

A term t with t(u_j) = v_j on finitely many inputs u_j exists iff the target vector
(v_j) lies in the subalgebra generated by the projection columns restricted to those
inputs. Closing that small subalgebra is exhaustive, so a finished closure that misses
the target is a real negative; the full term table is then rebuilt from provenance.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..budget import Budget, BudgetExceeded, InputError
from ..core.ops import closure, term_operation
from ..core.structures import Operation

ZHUK_REGIMES = {
    1: ({(0, 0, 1): 0, (0, 1, 0): 0, (0, 1, 1): 2}, {(0, 1): 0, (0, 2): 2}),
    2: ({(1, 0, 1): 1, (1, 1, 0): 1, (1, 0, 0): 2}, {(0, 1): 1, (2, 1): 2}),
}
LEMMA_FUN = {
    "p1": {(0, 1): 1, (1, 0): 2, (2, 0): 2},
    "p2": {(0, 1): 0, (1, 0): 2, (1, 2): 2},
}


@dataclass(frozen=True)
class TermSearch:
    status: str                       # "found", "not_found" or "inconclusive"
    operation: Operation | None = None

    def __bool__(self):
        return self.status == "found"


def find_term(ops: Sequence[Operation], arity: int, constraints: dict,
              budget: Budget | None = None) -> TermSearch:
    """A term operation of the clone of ops meeting the point constraints, if any."""
    if not ops:
        raise InputError("need at least one operation")
    size = ops[0].size
    inputs = sorted(constraints)
    target = tuple(constraints[u] for u in inputs)
    cols = [tuple(u[i] for u in inputs) for i in range(arity)]
    if target in cols:
        f = Operation.projection(size, arity, cols.index(target))
        return TermSearch("found", f)
    try:
        res = closure(list(ops), cols, size, budget=budget, provenance=True)
    except BudgetExceeded:
        return TermSearch("inconclusive")
    try:
        idx = res.elements.index(target)
    except ValueError:
        return TermSearch("not_found" if res.complete else "inconclusive")
    # seeds are the projection columns; duplicates collapse, so map each kept seed back
    seed_vars = []
    for i in range(len(res.elements)):
        if res.provenance[i] is None:
            seed_vars.append(cols.index(res.elements[i]))
    g, order = term_operation(res, idx, ops, size)
    pick = [seed_vars[i] for i in order]
    f = Operation.from_function(size, arity, lambda *xs: g(*[xs[v] for v in pick]))
    if any(f(*u) != v for u, v in constraints.items()):
        raise RuntimeError("rebuilt term does not meet its constraints")
    return TermSearch("found", f)


@dataclass(frozen=True)
class ZhukResult:
    status: str                       # "found", "not_found" or "inconclusive"
    regime: int | None = None
    p: Operation | None = None
    r3: Operation | None = None
    tried: tuple = ()                 # (regime, r3 status, p status)

    def __bool__(self):
        return self.status == "found"


def _check_domain(ops):
    if not ops or any(f.size != 3 for f in ops):
        raise InputError("these searches are over the domain {0,1,2}")


def check_zhuk_condition(ops: Sequence[Operation], budget: Budget | None = None) -> ZhukResult:
    _check_domain(ops)
    tried = []
    inconclusive = False
    for regime, (rc, pc) in ZHUK_REGIMES.items():
        r3 = find_term(ops, 3, rc, budget)
        p = find_term(ops, 2, pc, budget) if r3.status != "not_found" else TermSearch("not_found")
        tried.append((regime, r3.status, p.status))
        if r3 and p:
            if not (r3.operation.is_idempotent() and p.operation.is_idempotent()):
                raise RuntimeError("term operations of idempotent ops must be idempotent")
            return ZhukResult("found", regime, p.operation, r3.operation, tuple(tried))
        inconclusive |= "inconclusive" in (r3.status, p.status)
    return ZhukResult("inconclusive" if inconclusive else "not_found", tried=tuple(tried))


def find_lemma_fun_witnesses(ops: Sequence[Operation], budget: Budget | None = None) -> dict:
    """{"p1": TermSearch, "p2": TermSearch}; either may be absent or inconclusive."""
    _check_domain(ops)
    return {name: find_term(ops, 2, cons, budget) for name, cons in LEMMA_FUN.items()}
