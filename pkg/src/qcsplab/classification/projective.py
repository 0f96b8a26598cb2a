"""alpha-beta projectivity and the PGP/EGP split."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..budget import Budget, InputError
from ..core.ops import polymorphisms
from ..core.structures import Operation, Structure


def valid_pairs(size: int) -> list[tuple[frozenset, frozenset]]:
    """Unordered pairs of strict subsets whose union is the domain."""
    full = (1 << size) - 1
    out = []
    for a in range(1, full):
        for b in range(a + 1, full):
            if a | b == full:
                out.append((frozenset(i for i in range(size) if a >> i & 1),
                            frozenset(i for i in range(size) if b >> i & 1)))
    return out


def _check_pair(size: int, alpha, beta) -> tuple[frozenset, frozenset]:
    alpha, beta = frozenset(alpha), frozenset(beta)
    dom = frozenset(range(size))
    if not (alpha < dom and beta < dom and alpha | beta == dom):
        raise InputError("alpha and beta must be strict subsets covering the domain")
    return alpha, beta


def projective_coordinates(f: Operation, alpha, beta) -> list[int]:
    alpha, beta = _check_pair(f.size, alpha, beta)
    n, k = f.size, f.arity
    tab = f.array.reshape((n,) * k) if k else f.array
    in_a = np.isin(tab, sorted(alpha))
    in_b = np.isin(tab, sorted(beta))
    out = []
    for i in range(k):
        ok = True
        for a in range(n):
            sl = np.take(in_a, a, axis=i) if a in alpha else None
            if sl is not None and not sl.all():
                ok = False
                break
            sl = np.take(in_b, a, axis=i) if a in beta else None
            if sl is not None and not sl.all():
                ok = False
                break
        if ok:
            out.append(i)
    return out


def is_alpha_beta_projective(f: Operation, alpha, beta) -> bool:
    return bool(projective_coordinates(f, alpha, beta))


@dataclass(frozen=True)
class PGPVerdict:
    outcome: str                       # "PGP" or "EGP"
    pair: tuple | None = None          # EGP witness (alpha, beta)
    violators: dict = field(default_factory=dict)   # (alpha, beta) -> Operation

    def to_json(self) -> dict:
        out = {"outcome": self.outcome}
        if self.pair is not None:
            out["pair"] = [sorted(self.pair[0]), sorted(self.pair[1])]
        out["violators"] = [{"alpha": sorted(a), "beta": sorted(b), "arity": f.arity,
                             "table": list(f.table)} for (a, b), f in self.violators.items()]
        return out


def classify_pgp_egp(source, budget: Budget | None = None) -> PGPVerdict:
    """EGP iff one (alpha, beta) makes every checked operation alpha-beta projective.

    ``source`` is a list of basic operations, or a Structure; for a structure the
    idempotent polymorphisms up to arity max |R| are enumerated (within budget).
    """
    budget = budget or Budget()
    if isinstance(source, Structure):
        size = source.size
        top = max([len(R.tuples) for R in source.relations.values()] + [1])
        ops_by_arity = (lambda k: polymorphisms(source, k, idempotent_only=True, budget=budget))
        arities = range(1, top + 1)
    else:
        ops = list(source)
        if not ops:
            raise InputError("need at least one operation")
        size = ops[0].size
        ops_by_arity = None
        arities = [None]
    pairs = valid_pairs(size)
    if not pairs:
        raise InputError("no valid (alpha, beta) on a one-element domain")
    violators: dict = {}
    for k in arities:
        candidates = ops if ops_by_arity is None else ops_by_arity(k)
        for f in candidates:
            for pair in pairs:
                if pair not in violators and not is_alpha_beta_projective(f, *pair):
                    violators[pair] = f
            if len(violators) == len(pairs):
                return PGPVerdict("PGP", None, dict(sorted(violators.items(), key=_pair_key)))
    for pair in pairs:
        if pair not in violators:
            return PGPVerdict("EGP", pair, dict(sorted(violators.items(), key=_pair_key)))
    return PGPVerdict("PGP", None, violators)


def _pair_key(item):
    (a, b), _ = item
    return (sorted(a), sorted(b))
