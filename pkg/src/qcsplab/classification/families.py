"""Operation families on {0,1,2} and preservation reports against them."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from ..budget import Budget, InputError
from ..core.ops import preserves, term_closure
from ..core.relations import Relation
from ..core.structures import Operation

FAMILIES = ("f_a", "f_b", "f_hat_a", "f_hat_b", "chen_r", "chen_s")


def _swap(v: int) -> int:
    return {0: 1, 1: 0}.get(v, v)


def _f_a(xs) -> int:
    if all(v == 0 for v in xs):
        return 0
    if all(v == 1 for v in xs):
        return 1
    if all(v in (0, 1) for v in xs) and sum(xs) == 1:
        return 0
    return 2


def _f_hat_a(xs) -> int:
    if all(v == 0 for v in xs):
        return 0
    if all(v == 1 for v in xs):
        return 1
    if xs[0] == 1 and all(v in (0, 1) for v in xs[1:]) and sum(xs[1:]) == 1:
        return 0
    return 2


_CHEN_R = {(0, 1, 1, 1): 1, (1, 0, 1, 1): 1, (0, 0, 0, 1): 0, (0, 0, 1, 0): 0}


def make_family_op(name: str, n: int = 2, size: int = 3) -> Operation:
    """Tables of the Gap-algebra families. Unlisted inputs go to 2; diagonals are idempotent."""
    if size != 3:
        raise InputError("family operations live on {0,1,2}")
    if name in ("f_a", "f_b"):
        if n < 3:
            raise InputError("f_a/f_b need n >= 3")
        base, arity = _f_a, n + 1
    elif name in ("f_hat_a", "f_hat_b"):
        if n < 2:
            raise InputError("f_hat needs n >= 2")
        base, arity = _f_hat_a, n + 2
    elif name == "chen_r":
        arity = 4
        base = lambda xs: _CHEN_R.get(xs, xs[0] if len(set(xs)) == 1 else 2)
    elif name == "chen_s":
        arity = 2
        base = lambda xs: xs[0] if xs[0] == xs[1] else 2
    else:
        raise InputError(f"unknown family {name!r}; choose from {', '.join(FAMILIES)}")
    if name.endswith("_b"):
        fn = lambda *xs: _swap(base(tuple(_swap(v) for v in xs)))
    else:
        fn = lambda *xs: base(tuple(xs))
    return Operation.from_function(3, arity, fn)


@dataclass(frozen=True)
class PreservationEntry:
    relation: Relation
    preserved: bool
    witness: tuple | None = None       # columns (tuples of R) mapped outside R


@dataclass(frozen=True)
class FamilyReport:
    operation: Operation
    entries: tuple
    in_regime: bool                   # all relation arities below the lemma's bound
    lemma_consistent: bool | None = None

    @property
    def all_preserved(self) -> bool:
        return all(e.preserved for e in self.entries)

    def to_json(self) -> dict:
        return {"arity": self.operation.arity, "in_regime": self.in_regime,
                "lemma_consistent": self.lemma_consistent, "all_preserved": self.all_preserved,
                "relations": [{"arity": e.relation.arity, "size": len(e.relation.tuples),
                               "preserved": e.preserved,
                               "witness": [list(t) for t in e.witness] if e.witness else None}
                              for e in self.entries]}


def check_family_preservation(fam: Operation, relations: Sequence[Relation],
                              from_gap_algebra: bool = False) -> FamilyReport:
    """Preservation of each relation by fam, with counterexample columns.

    ``from_gap_algebra`` says the relations are invariants of a Gap algebra meeting the
    lemma's hypotheses; then, inside the arity regime, everything must be preserved and
    lemma_consistent records whether it was.
    """
    entries = []
    for R in relations:
        ok, w = preserves(fam, R, witness=True)
        entries.append(PreservationEntry(R, ok, w))
    # f^a_n has arity n+1 and f-hat^a_n arity n+2: both regimes read "arity < fam.arity"
    in_regime = all(R.arity < fam.arity for R in relations)
    consistent = None
    if from_gap_algebra and in_regime:
        consistent = all(e.preserved for e in entries)
    return FamilyReport(fam, tuple(entries), in_regime, consistent)


def invariant_relations(ops: Sequence[Operation], arity: int, size: int,
                        budget: Budget | None = None) -> list[Relation]:
    """All relations of the given arity preserved by every op, as closures of generating sets.

    Each invariant relation is the subuniverse of A^arity it generates, so closing every
    subset would do; closing from single tuples and joining upward suffices and is cheaper.
    """
    universe = list(itertools.product(range(size), repeat=arity))
    found: set[frozenset] = {frozenset()}
    frontier = [frozenset()]
    while frontier:
        nxt = []
        for R in frontier:
            for t in universe:
                if t in R:
                    continue
                C = term_closure(list(ops), sorted(R | {t}), size=size, budget=budget)
                if C not in found:
                    found.add(C)
                    nxt.append(C)
        frontier = nxt
    return [Relation(arity, sorted(R)) for R in sorted(found, key=lambda R: (len(R), sorted(R)))]
