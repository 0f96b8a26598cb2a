"""Existentially trivial relations and the canon-based evaluator."""
from __future__ import annotations

import itertools
from typing import Sequence

from ..budget import Budget, InputError
from ..core.relations import Relation
from ..core.structures import Structure
from ..logic import EqAtom, GameVerdict, PHSentence, RelAtom


def is_canon(c: int, relations: Sequence[Relation]) -> bool:
    for R in relations:
        for t in R.tuples:
            for i in range(R.arity):
                if t[:i] + (c,) + t[i + 1:] not in R.tuples:
                    return False
    return True


def find_canon(relations: Sequence[Relation], size: int) -> int | None:
    """Least element that can replace any coordinate of any member tuple."""
    for c in range(size):
        if is_canon(c, relations):
            return c
    return None


def _project(R: Relation, coords) -> frozenset:
    return frozenset(tuple(t[i] for i in coords) for t in R.tuples)


def check_closure(relations: Sequence[Relation], size: int) -> list[str]:
    """Projections and constant instantiations that leave the supplied set (by tuple set).

    Total and empty relations of any arity count as present.
    """
    have = {(R.arity, R.tuples) for R in relations}
    out = []
    for n, R in enumerate(relations):
        for i in range(R.arity):
            rest = [j for j in range(R.arity) if j != i]
            derived = [("projection", i, _project(R, rest))]
            for a in range(size):
                derived.append((f"x{i + 1}={a}", i,
                                frozenset(t[:i] + t[i + 1:] for t in R.tuples if t[i] == a)))
            for what, _, ts in derived:
                k = R.arity - 1
                if not ts or len(ts) == size ** k or (k, ts) in have:
                    continue
                out.append(f"relation {n}: {what} gives a new {k}-ary relation")
    return out


def _instantiate(R: Relation, args) -> tuple[list, set]:
    """Variables of an atom (first occurrences) and the allowed tuples over them."""
    first: dict = {}
    for p, a in enumerate(args):
        if isinstance(a, str):
            first.setdefault(a, p)
    vars_ = list(first)
    allowed = set()
    for t in R.tuples:
        if all((t[p] == t[first[a]]) if isinstance(a, str) else t[p] == a
               for p, a in enumerate(args)):
            allowed.add(tuple(t[first[v]] for v in vars_))
    return vars_, allowed


def conp_eval(S: Structure, phi: PHSentence, canon: int | None = None,
              budget: Budget | None = None) -> GameVerdict:
    """Evaluate by removing equalities, instantiating existentials to a canon, then checking
    each remaining atom against every assignment of its universals.

    Forced coordinates and forced-equal pairs are turned into equalities first.
    """
    n = S.size
    order = {v: i for i, (_, v) in enumerate(phi.prefix)}
    kind = {v: q for q, v in phi.prefix}
    if canon is None:
        canon = find_canon(list(S.relations.values()), n)
        if canon is None:
            raise InputError("no canon: the relations are not existentially trivial")
    subst: dict = {}

    def res(t):
        while isinstance(t, str) and t in subst:
            t = subst[t]
        return t

    def false(why):
        return GameVerdict(False, play=(), counter=("conp", why), nodes=0)

    eqs = [(a.left, a.right) for a in phi.atoms if isinstance(a, EqAtom)]
    rels = [(a.rel, a.args) for a in phi.atoms if isinstance(a, RelAtom)]
    changed = True
    while changed:
        changed = False
        # equalities: the later-quantified side must be existential and is substituted away
        while eqs:
            l, r = eqs.pop()
            l, r = res(l), res(r)
            if l == r:
                continue
            if isinstance(l, int) and isinstance(r, int):
                return false(f"{l}={r}")
            if isinstance(l, int) or (isinstance(r, str) and order[r] > order[l]):
                l, r = r, l
            if kind[l] == "A" and n > 1:
                return false(f"universal {l} is pinned by an equality")
            subst[l] = r
            changed = True
        # forced coordinates and forced-equal pairs inside relations
        for rel, args in rels:
            args = tuple(res(a) for a in args)
            vars_, allowed = _instantiate(S.relations[rel], args)
            if not allowed:
                return false(f"{rel} is unsatisfiable after instantiation")
            for i, v in enumerate(vars_):
                vals = {t[i] for t in allowed}
                if len(vals) == 1 and n > 1:
                    eqs.append((v, next(iter(vals))))
            for i, j in itertools.combinations(range(len(vars_)), 2):
                if all(t[i] == t[j] for t in allowed) and n > 1:
                    eqs.append((vars_[i], vars_[j]))
            if eqs:
                changed = True
                break
    # existentials go to the canon; this is sound when, for each atom, any universal values
    # admitting some existential completion also admit the all-canon one
    for rel, args in rels:
        args = tuple(res(a) for a in args)
        vars_, allowed = _instantiate(S.relations[rel], args)
        ex = [i for i, v in enumerate(vars_) if kind[v] == "E"]
        if ex and any(tuple(canon if i in ex else t[i] for i in range(len(t))) not in allowed
                      for t in allowed):
            raise InputError(f"{canon} is not a canon for {rel} as instantiated")
    for q, v in phi.prefix:
        if q == "E" and res(v) == v:
            subst[v] = canon
    for rel, args in rels:
        args = tuple(res(a) for a in args)
        univ = sorted({a for a in args if isinstance(a, str)}, key=order.get)
        R = S.relations[rel].tuples
        for vals in itertools.product(range(n), repeat=len(univ)):
            m = dict(zip(univ, vals))
            t = tuple(m[a] if isinstance(a, str) else a for a in args)
            if t not in R:
                play = tuple(m.get(u, 0) for u in phi.universals if res(u) == u)
                return GameVerdict(False, play=play, counter=("conp", f"{rel}{t}"), nodes=0)
    skolem = {v: {(): res(v)} for v in phi.existentials if isinstance(res(v), int)}
    return GameVerdict(True, skolem=(skolem,), nodes=0)
