"""Reduction of restricted QCSP evaluation to a single CSP instance."""
from __future__ import annotations

from dataclasses import dataclass

from ..adversaries import AdversarySet
from ..budget import Budget, Counter, InputError
from ..core.solver import CSP, full_mask
from ..core.structures import Structure
from ..logic import EqAtom, PHSentence, RelAtom


@dataclass(frozen=True)
class CSPInstance:
    """Existential instance over ``structure``; args are variable indices or ("c", element)."""
    structure: Structure
    variables: tuple              # printable names
    atoms: tuple                  # (relation name or "=", args)

    @property
    def size(self) -> int:
        """Encoding size: one unit per variable plus one per atom argument."""
        return len(self.variables) + sum(max(len(args), 1) for _, args in self.atoms)

    def as_sentence(self) -> PHSentence:
        names = [f"v{i}" for i in range(len(self.variables))]

        def term(a):
            return a[1] if isinstance(a, tuple) else names[a]

        atoms = []
        for rel, args in self.atoms:
            if rel == "=":
                atoms.append(EqAtom(term(args[0]), term(args[1])))
            else:
                atoms.append(RelAtom(rel, tuple(term(a) for a in args)))
        return PHSentence(tuple(("E", v) for v in names), tuple(atoms), allow_equality=True)


def qcsp_to_csp(S: Structure, phi: PHSentence, omega: AdversarySet,
                split: bool = False) -> CSPInstance | list[CSPInstance]:
    """One copy of the matrix per adversary tuple, with Skolem-consistent sharing.

    The copy of existential x for tuple t of member B is keyed by (B, x, t restricted to
    the universals before x); two tuples agreeing there share the variable, which is the
    identification of copies that makes the instance encode Skolem functions.
    """
    if omega.length != len(phi.universals):
        raise InputError(f"adversary length {omega.length} != {len(phi.universals)} universals")
    if omega.size != S.size:
        raise InputError("adversaries and structure have different domains")
    named = S.named_elements()
    missing = sorted({a for B in omega.members for t in B.tuples for a in t} - named)
    if missing:
        raise InputError(f"structure names no constant for element(s) {missing}")
    uidx = {v: i for i, v in enumerate(phi.universals)}
    before: dict[str, int] = {}
    count = 0
    for q, v in phi.prefix:
        if q == "A":
            count += 1
        else:
            before[v] = count
    pools = []
    for b, B in enumerate(omega.members):
        index: dict = {}
        names: list = []
        atoms: list = []

        def var(x, t):
            key = (x, t[:before[x]])
            if key not in index:
                index[key] = len(names)
                names.append(f"{x}@{b}[" + ",".join(map(str, key[1])) + "]")
            return index[key]

        for t in sorted(B.tuples):
            def term(a):
                if isinstance(a, int):
                    return ("c", a)
                if a in uidx:
                    return ("c", t[uidx[a]])
                return var(a, t)
            for atom in phi.atoms:
                rel = "=" if isinstance(atom, EqAtom) else atom.rel
                atoms.append((rel, tuple(term(a) for a in atom.args)))
        pools.append((names, atoms))
    if split:
        return [CSPInstance(S, tuple(n), tuple(a)) for n, a in pools]
    names, atoms = [], []
    for n, a in pools:
        shift = len(names)
        names.extend(n)
        atoms.extend((rel, tuple(x + shift if isinstance(x, int) else x for x in args))
                     for rel, args in a)
    return CSPInstance(S, tuple(names), tuple(atoms))


def solve_csp_instance(inst: CSPInstance, budget: Budget | None = None) -> dict | None:
    """A satisfying assignment {variable index: element}, or None."""
    budget = budget or Budget()
    S = inst.structure
    csp = CSP([full_mask(S.size)] * len(inst.variables))
    for rel, args in inst.atoms:
        source = [(a, a) for a in range(S.size)] if rel == "=" else S.relations[rel].tuples
        scope, pos = [], []
        for p, a in enumerate(args):
            if not isinstance(a, tuple):
                scope.append(a)
                pos.append(p)
        allowed = [tuple(t[p] for p in pos) for t in source
                   if all(t[p] == a[1] for p, a in enumerate(args) if isinstance(a, tuple))]
        csp.add(scope, allowed)
    if csp.failed:
        return None
    sol = csp.solve(Counter(budget.search_nodes, "CSP search nodes"))
    if sol is None:
        return None
    return {i: sol[i] for i in range(len(inst.variables))}
