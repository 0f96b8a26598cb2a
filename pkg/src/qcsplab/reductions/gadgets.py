"""The sigma_k / tau_k relations, the pp-definition of tau_k, and the 3NAESAT reduction."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..budget import Budget, BudgetExceeded, InputError
from ..core.relations import And, Atom, Or, Relation, RelationExpr, materialize
from ..core.structures import Structure
from ..logic import PHSentence, RelAtom

ALPHA, BETA = frozenset({0, 1}), frozenset({1, 2})


def _pair(alpha, beta, size):
    alpha, beta = frozenset(alpha), frozenset(beta)
    dom = frozenset(range(size))
    if not (alpha < dom and beta < dom and alpha | beta == dom):
        raise InputError("alpha and beta must be strict subsets covering the domain")
    return alpha, beta


def _blocks(alpha, beta, k, width) -> RelationExpr:
    parts = []
    for i in range(k):
        for S in (alpha, beta):
            for vals in itertools.product(sorted(S), repeat=width):
                parts.append(And(tuple(Atom(width * i + j, v, False, True)
                                       for j, v in enumerate(vals))))
    return RelationExpr(width * k, Or(tuple(parts)))


def sigma_k(alpha, beta, k: int, size: int = 3) -> RelationExpr:
    """rho(x1,y1) | ... | rho(xk,yk) with rho = alpha^2 u beta^2, in DNF over constant atoms."""
    alpha, beta = _pair(alpha, beta, size)
    if k < 0:
        raise InputError("k must be nonnegative")
    return _blocks(alpha, beta, k, 2)


def tau_k(alpha, beta, k: int, size: int = 3) -> RelationExpr:
    """rho'(x1,y1,z1) | ... with rho' = alpha^3 u beta^3."""
    alpha, beta = _pair(alpha, beta, size)
    if k < 0:
        raise InputError("k must be nonnegative")
    return _blocks(alpha, beta, k, 3)


def block_relation(alpha, beta, k: int, width: int, size: int = 3) -> Relation:
    """Materialized sigma_k (width 2) or tau_k (width 3), built from the definition directly."""
    alpha, beta = _pair(alpha, beta, size)
    if k == 0:
        return Relation(0, [])
    base = {t for S in (alpha, beta) for t in itertools.product(sorted(S), repeat=width)}
    ts = [t for t in itertools.product(range(size), repeat=width * k)
          if any(t[width * i:width * i + width] in base for i in range(k))]
    return Relation(width * k, ts)


def tuple_count(alpha, beta, k: int, width: int, size: int = 3) -> int:
    """|sigma_k| or |tau_k| in closed form: all tuples minus those failing every block."""
    alpha, beta = _pair(alpha, beta, size)
    block = len(alpha) ** width + len(beta) ** width - len(alpha & beta) ** width
    return size ** (width * k) - (size ** width - block) ** k


@dataclass(frozen=True)
class PPDefinition:
    """A quantifier-free conjunction of sigma_k atoms over the 3k variables of tau_k."""
    k: int
    conjuncts: tuple               # each a tuple of 2k variable indices

    def text(self) -> str:
        return " & ".join(f"sigma{self.k}(" + ",".join(f"x{i + 1}" for i in c) + ")"
                          for c in self.conjuncts)


@dataclass(frozen=True)
class PPReport:
    definition: PPDefinition
    equal: bool
    phi_size: int
    tau_size: int
    extra: tuple = ()              # in Phi but not in tau_k (a few, for diagnosis)
    missing: tuple = ()            # in tau_k but not in Phi

    def to_json(self) -> dict:
        return {"k": self.definition.k, "conjuncts": len(self.definition.conjuncts),
                "equal": self.equal, "phi_tuples": self.phi_size, "tau_tuples": self.tau_size,
                "extra": [list(t) for t in self.extra], "missing": [list(t) for t in self.missing]}


_PAIRS = ((0, 1), (1, 2), (0, 2))


def pp_definition(k: int, drop: Sequence[int] = ()) -> PPDefinition:
    """All 3^k ways of choosing one pair from each triple; ``drop`` removes conjuncts by index."""
    out = []
    for choice in itertools.product(_PAIRS, repeat=k):
        c = []
        for i, (p, q) in enumerate(choice):
            c += [3 * i + p, 3 * i + q]
        out.append(tuple(c))
    out = [c for n, c in enumerate(out) if n not in set(drop)]
    return PPDefinition(k, tuple(out))


def pp_define_tau_in_sigma(k: int, alpha=ALPHA, beta=BETA, size: int = 3, drop: Sequence[int] = (),
                           budget: Budget | None = None) -> PPReport:
    """Materialize Phi (vectorized) and tau_k (from its DNF) and compare the tuple sets."""
    budget = budget or Budget()
    alpha, beta = _pair(alpha, beta, size)
    if k < 1:
        raise InputError("k must be positive")
    total = size ** (3 * k)
    if total > budget.materialize:
        raise BudgetExceeded("pp-definition materialization", budget.materialize, total)
    definition = pp_definition(k, drop)
    rho = np.zeros((size, size), dtype=bool)
    for S in (alpha, beta):
        for a in S:
            for b in S:
                rho[a, b] = True
    grid = np.indices((size,) * (3 * k)).reshape(3 * k, -1)
    phi = np.ones(total, dtype=bool)
    for c in definition.conjuncts:
        hit = np.zeros(total, dtype=bool)
        for i in range(k):
            hit |= rho[grid[c[2 * i]], grid[c[2 * i + 1]]]
        phi &= hit
    phi_set = {tuple(int(v) for v in grid[:, j]) for j in np.flatnonzero(phi)}
    tau = materialize(tau_k(alpha, beta, k, size), size, budget).tuples
    extra = tuple(sorted(phi_set - tau)[:5])
    missing = tuple(sorted(tau - phi_set)[:5])
    return PPReport(definition, phi_set == tau, len(phi_set), len(tau), extra, missing)


# ---------------------------------------------------------------- 3NAESAT

@dataclass(frozen=True)
class NAEInstance:
    nvars: int
    clauses: tuple                 # triples of variable indices

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        for c in self.clauses:
            if len(c) != 3 or any(not 0 <= v < self.nvars for v in c):
                raise InputError(f"bad clause {c}")


def nae_satisfiable(I: NAEInstance) -> bool:
    for bits in itertools.product((0, 1), repeat=I.nvars):
        if all(len({bits[v] for v in c}) > 1 for c in I.clauses):
            return True
    return False


def tau_structure(ks: Sequence[int], alpha=ALPHA, beta=BETA, size: int = 3,
                  constants: bool = True) -> Structure:
    """({0..size-1}; tau_k for k in ks) with every element named when ``constants``."""
    rels = {}
    for k in sorted(set(ks)):
        if k == 0:
            rels["tau0"] = Relation(0, [])
        else:
            expr = tau_k(alpha, beta, k, size)
            rels[f"tau{k}"] = Relation(3 * k, block_relation(alpha, beta, k, 3, size).tuples, expr)
    S = Structure(size, rels)
    return S.with_constants() if constants else S


def naesat_complement_reduction(I: NAEInstance, alpha=ALPHA, beta=BETA,
                                size: int = 3) -> tuple[PHSentence, Structure]:
    """psi = forall v1..vm tau_k(clause slots); psi is false iff I is NAE-satisfiable."""
    alpha, beta = _pair(alpha, beta, size)
    if alpha <= beta or beta <= alpha:
        raise InputError("alpha minus beta and beta minus alpha must both be nonempty")
    k = len(I.clauses)
    args = tuple(f"v{v + 1}" for c in I.clauses for v in c)
    prefix = tuple(("A", f"v{i + 1}") for i in range(I.nvars))
    phi = PHSentence(prefix, (RelAtom(f"tau{k}", args),), allow_equality=False)
    return phi, tau_structure([k], alpha, beta, size)
