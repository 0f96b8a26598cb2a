"""Canonical Pi_2 sentences and the singleton-source collapsibility test they power."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .adversaries import (Adversary, AdversarySet, ReactiveWitness, is_degenerate, upsilon,
                          verify_reactive)
from .budget import Budget, BudgetExceeded, InputError
from .core.ops import find_near_unanimity, subpower_full_nu
from .core.structures import Operation, Structure, flatten, unflatten
from .logic import EqAtom, GameVerdict, PHSentence, RelAtom, eval_qcsp


@dataclass(frozen=True)
class CanonicalSentence:
    sentence: PHSentence
    mode: str                   # "pi2" or "general"
    omega: AdversarySet
    structure: Structure
    coords: tuple               # one vector per product coordinate
    sources: tuple              # member index of omega for each coordinate
    universals: tuple           # universal variable names, in prefix order
    n: int = 1                  # block size (general mode)

    @property
    def product_arity(self) -> int:
        return len(self.coords)

    @property
    def product_size(self) -> int:
        return self.structure.size ** len(self.coords)

    def constant_vector(self, u: int) -> tuple:
        """The product element interpreted by universal number u."""
        return tuple(c[u] for c in self.coords)

    def term_of(self, e: int):
        """Sentence term standing for product element e (None if e occurs in no atom)."""
        cache = self.__dict__.get("_term_cache")
        if cache is None:
            cache = dict(_element_terms(self.structure, self.coords, self.universals)[0])
            for v in self.sentence.existentials:
                cache.setdefault(int(v[1:]), v)
            object.__setattr__(self, "_term_cache", cache)
        return cache.get(e)


def _element_terms(S: Structure, coords, universals):
    """Map product elements to terms: universals, S's constants, or fresh existentials."""
    n, k = S.size, len(coords)
    terms: dict[int, object] = {}
    extra_eq = []
    for u, name in enumerate(universals):
        e = flatten([c[u] for c in coords], n)
        if e in terms:
            extra_eq.append(EqAtom(terms[e], name))
        else:
            terms[e] = name
    for d in sorted(set(S.constants.values())):
        e = flatten([d] * k, n)
        if e in terms:
            extra_eq.append(EqAtom(terms[e], d))
        else:
            terms[e] = d
    return terms, extra_eq


def _build(S: Structure, coords: list, universals: list, budget: Budget) -> PHSentence:
    n, k = S.size, len(coords)
    atoms_needed = sum(len(R.tuples) ** k for R in S.relations.values())
    if atoms_needed > budget.product_atoms:
        raise BudgetExceeded("canonical sentence atoms", budget.product_atoms, atoms_needed)
    terms, eqs = _element_terms(S, coords, universals)
    atoms = []
    used = set()
    for name, R in S.relations.items():
        for choice in itertools.product(sorted(R.tuples), repeat=k):
            args = []
            for col in zip(*choice):
                e = flatten(col, n)
                t = terms.get(e)
                if t is None:
                    t = terms[e] = f"y{e}"
                if isinstance(t, str) and t.startswith("y"):
                    used.add(e)
                args.append(t)
            if R.arity == 0:
                args = []
            atoms.append(RelAtom(name, tuple(args)))
    prefix = [("A", u) for u in universals] + [("E", f"y{e}") for e in sorted(used)]
    return PHSentence(tuple(prefix), tuple(eqs) + tuple(atoms), allow_equality=True)


def canonical_pi2(omega: AdversarySet, S: Structure, budget: Budget | None = None) -> CanonicalSentence:
    """Universalized canonical query of the product of one copy of S per tuple of the union."""
    budget = budget or Budget()
    if omega.size != S.size:
        raise InputError("adversaries and structure have different domains")
    if is_degenerate(omega):
        raise InputError("degenerate adversary set: canonical sentence undefined")
    coords = omega.all_tuples()
    universals = [f"w{j + 1}" for j in range(omega.length)]
    sources = tuple(next(b for b, B in enumerate(omega.members) if t in B.tuples) for t in coords)
    phi = _build(S, coords, universals, budget)
    return CanonicalSentence(phi, "pi2", omega, S, tuple(coords), sources, tuple(universals))


def consistent_maps(n: int, O: Adversary) -> list[tuple]:
    """Maps mu: [n] x [m] -> A, as nm-vectors in block order (index j*n + i), consistent with O.

    mu is consistent when every choice of one index per block lands in O, i.e.
    mu(.,1)-values x ... x mu(.,m)-values is contained in O.
    """
    m, size = O.length, O.size
    prefixes = [{t[:j] for t in O.tuples} for j in range(m + 1)]
    columns = list(itertools.product(range(size), repeat=n))
    out = []

    def rec(j, chosen, partial):
        if j == m:
            out.append(tuple(v for col in chosen for v in col))
            return
        for col in columns:
            vals = sorted(set(col))
            nxt = {p + (v,) for p in partial for v in vals}
            if nxt <= prefixes[j + 1]:
                chosen.append(col)
                rec(j + 1, chosen, nxt)
                chosen.pop()

    rec(0, [], {()})
    return out


def general_coords(n: int, omega: AdversarySet) -> tuple[list, list]:
    """Distinct consistent maps over all members, with the first member each comes from."""
    seen: dict[tuple, int] = {}
    for b, O in enumerate(omega.members):
        for mu in consistent_maps(n, O):
            seen.setdefault(mu, b)
    coords = list(seen)
    return coords, [seen[c] for c in coords]


def canonical_general(n: int, omega: AdversarySet, S: Structure,
                      budget: Budget | None = None) -> CanonicalSentence:
    budget = budget or Budget()
    if omega.size != S.size:
        raise InputError("adversaries and structure have different domains")
    if n < 1:
        raise InputError("n must be positive")
    if is_degenerate(omega):
        raise InputError("degenerate adversary set: canonical sentence undefined")
    coords, sources = general_coords(n, omega)
    universals = [f"w{i + 1}_{j + 1}" for j in range(omega.length) for i in range(n)]
    phi = _build(S, coords, universals, budget)
    return CanonicalSentence(phi, "general", omega, S, tuple(coords), tuple(sources),
                             tuple(universals), n)


def extract_witness_operation(canon: CanonicalSentence, verdict: GameVerdict,
                              target: Sequence[int] | None = None) -> tuple[Operation, ReactiveWitness]:
    """Read the k-ary polymorphism off a true verdict, with its last-coordinate maps.

    General mode uses the assignment in which each block of universals enumerates A
    (this needs n = |A|); Pi_2 mode needs the target tuple.
    """
    S = canon.structure
    size, k = S.size, canon.product_arity
    if not verdict.holds or len(verdict.skolem) != 1:
        raise InputError("a true verdict for the canonical sentence is required")
    m = canon.omega.length
    if canon.mode == "general":
        if canon.n != size:
            raise InputError("extraction needs n = |A|")
        values = tuple(i for _ in range(m) for i in range(size))
    else:
        if target is None or len(target) != m:
            raise InputError("Pi_2 extraction needs a target tuple of length m")
        values = tuple(target)
    assign = dict(zip(canon.universals, values))
    tables = verdict.skolem[0]
    table = []
    for e in range(size ** k):
        t = canon.term_of(e)
        if t is None:
            table.append(unflatten(e, size, k)[0] if k else 0)
        elif isinstance(t, int):
            table.append(t)
        elif t in assign:
            table.append(assign[t])
        else:
            v = tables.get(t, {}).get(values)
            if v is None:
                raise InputError(f"verdict has no value for {t} at the extraction assignment")
            table.append(v)
    f = Operation(size, k, table)
    if canon.mode == "general":
        g = tuple(tuple({(a,): mu[j * size + a] for a in range(size)} for j in range(m))
                  for mu in canon.coords)
    else:
        g = tuple(tuple({(values[j],): mu[j]} for j in range(m)) for mu in canon.coords)
    return f, ReactiveWitness(f, canon.sources, g, True)


@dataclass(frozen=True)
class CollapsibilityVerdict:
    holds: bool
    method: str                 # "canonical" or "nu-closure"
    p: int
    source: int
    product_arity: int
    operation: Operation | None = None
    witness: ReactiveWitness | None = None
    detail: str = ""


def decide_p_collapsible_singleton(S: Structure, x: int, p: int, budget: Budget | None = None,
                                   helper_ops: Sequence[Operation] | None = None) -> CollapsibilityVerdict:
    """Whether S is p-collapsible from {x}, via the general canonical sentence for Upsilon_{p+1,p,x}.

    When the sentence is too large to evaluate, a positive answer can still be certified:
    the sentence holds iff the consistent maps generate A^{nm} under Pol(S), and closing
    under a near-unanimity polymorphism decides that closure through small projections.
    A failed certificate is reported as a budget overrun, never as a negative.
    """
    budget = budget or Budget()
    if p <= 0:
        raise InputError("p must be positive: Upsilon_{m,0} is degenerate")
    if not 0 <= x < S.size:
        raise InputError("source element outside the domain")
    n = S.size
    Sx = S if x in S.named_elements() else S.with_constants([x])
    omega = upsilon(p + 1, p, [x], n)
    coords, _ = general_coords(n, omega)
    k = len(coords)
    atoms_needed = sum(len(R.tuples) ** k for R in Sx.relations.values())
    if atoms_needed <= budget.product_atoms and n ** k <= budget.product_atoms:
        canon = canonical_general(n, omega, Sx, budget)
        verdict = eval_qcsp(Sx, canon.sentence, budget)
        if not verdict.holds:
            return CollapsibilityVerdict(False, "canonical", p, x, k,
                                         detail=f"falsified at universal play {verdict.play}")
        f, w = extract_witness_operation(canon, verdict)
        check = verify_reactive(Adversary.full(n, p + 1), omega, w)
        if not check:
            raise RuntimeError(f"extracted witness failed verification: {check.locus}")
        return CollapsibilityVerdict(True, "canonical", p, x, k, f, w)
    helpers = list(helper_ops) if helper_ops is not None else []
    if helper_ops is None:
        nu = find_near_unanimity(Sx, 3, budget)
        if nu is not None:
            helpers.append(nu)
    if helpers and subpower_full_nu(helpers, coords, n, budget):
        return CollapsibilityVerdict(True, "nu-closure", p, x, k,
                                     detail=f"{k} consistent maps generate A^{n * (p + 1)} under a near-unanimity polymorphism")
    raise BudgetExceeded(f"canonical sentence for p={p} (product arity {k})",
                         budget.product_atoms, atoms_needed)


def is_conservative_on(ops: Sequence[Operation], B: Sequence[int]) -> bool:
    """Every op maps tuples from any nonempty C within B back into C."""
    B = sorted(set(B))
    for r in range(1, len(B) + 1):
        for C in itertools.combinations(B, r):
            Cs = set(C)
            for f in ops:
                for args in itertools.product(C, repeat=f.arity):
                    if f(*args) not in Cs:
                        return False
    return True
