"""Surjective hyper-operations and 0-collapsibility."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..budget import Budget, Counter, InputError
from ..core.solver import CSP, full_mask
from ..core.structures import Structure, flatten, power


@dataclass(frozen=True)
class Shop:
    images: tuple             # images[a] is a frozenset

    def __post_init__(self):
        ims = tuple(frozenset(s) for s in self.images)
        object.__setattr__(self, "images", ims)
        if any(not s for s in ims):
            raise InputError("every image of a shop is nonempty")
        if set().union(*ims) != set(range(len(ims))):
            raise InputError("a shop must be surjective")

    def is_simple_A_shop(self) -> bool:
        n = len(self.images)
        full = [a for a, s in enumerate(self.images) if len(s) == n]
        return any(all(len(s) == 1 for b, s in enumerate(self.images) if b != x) for x in full)

    def to_json(self) -> dict:
        return {str(a): sorted(s) for a, s in enumerate(self.images)}


def is_she(S: Structure, shop: Shop) -> bool:
    """Hyper-endomorphism check: every tuple of R maps only to tuples of R."""
    f = shop.images
    if len(f) != S.size:
        return False
    for c in S.constants.values():
        if f[c] != frozenset([c]):
            return False
    for R in S.relations.values():
        for t in R.tuples:
            for img in itertools.product(*[sorted(f[a]) for a in t]):
                if img not in R.tuples:
                    return False
    return True


def has_simple_A_she(S: Structure, at: int | None = None, budget: Budget | None = None) -> Shop | None:
    """A simple A-shop that is a she of S, or None. Exhaustive, so None is a decision.

    For each candidate x (f(x) = A) the singleton images g(y), y != x, are found by a CSP:
    a tuple of R containing x at positions X forces every filling of X to stay in R.
    """
    budget = budget or Budget()
    n = S.size
    xs = range(n) if at is None else [at]
    for x in xs:
        if n > 1 and any(c == x for c in S.constants.values()):
            continue
        others = [y for y in range(n) if y != x]
        var = {y: i for i, y in enumerate(others)}
        csp = CSP([full_mask(n)] * len(others))
        for c in S.constants.values():
            if c != x:
                csp.fix(var[c], c)
        for R in S.relations.values():
            for t in R.tuples:
                free = [p for p, a in enumerate(t) if a == x]
                names = sorted({a for a in t if a != x})
                allowed = []
                for vals in itertools.product(range(n), repeat=len(names)):
                    g = dict(zip(names, vals))
                    ok = True
                    for fill in itertools.product(range(n), repeat=len(free)):
                        img = list(g.get(a, 0) for a in t)
                        for p, v in zip(free, fill):
                            img[p] = v
                        if tuple(img) not in R.tuples:
                            ok = False
                            break
                    if ok:
                        allowed.append(vals)
                csp.add([var[a] for a in names], allowed)
        sol = csp.solve(Counter(budget.search_nodes))
        if sol is not None:
            images = [frozenset([sol[var[y]]]) if y != x else frozenset(range(n)) for y in range(n)]
            return Shop(tuple(images))
    return None


def zero_collapsible_from_source(S: Structure, C, budget: Budget | None = None) -> Shop | None:
    """0-collapsibility from a source set C, via the |C|-th power and its rainbow element."""
    C = sorted(set(C))
    if not C or any(not 0 <= c < S.size for c in C):
        raise InputError("source must be a nonempty subset of the domain")
    P = power(Structure(S.size, S.relations), len(C))
    return has_simple_A_she(P, at=flatten(C, S.size), budget=budget)
