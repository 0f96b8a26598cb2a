"""Seeded random structures, sentences and adversary sets for property checks."""
from __future__ import annotations

import itertools
import random

from .adversaries import Adversary, AdversarySet
from .core.relations import Relation
from .core.structures import Structure
from .logic import EqAtom, PHSentence, RelAtom


def random_relation(rng: random.Random, size: int, arity: int, density: float = 0.5) -> Relation:
    ts = [t for t in itertools.product(range(size), repeat=arity) if rng.random() < density]
    return Relation(arity, ts)


def random_structure(rng: random.Random, size: int = 2, relations: int = 2, max_arity: int = 2,
                     density: float = 0.6, constants: bool = True) -> Structure:
    rels = {}
    for i in range(relations):
        arity = rng.randint(1, max_arity)
        rels[f"R{i}"] = random_relation(rng, size, arity, density)
    S = Structure(size, rels)
    return S.with_constants() if constants else S


def random_sentence(rng: random.Random, S: Structure, universals: int = 2, existentials: int = 2,
                    atoms: int = 3, pi2: bool = False, const_prob: float = 0.15,
                    eq_prob: float = 0.0) -> PHSentence:
    us = [f"x{i + 1}" for i in range(universals)]
    es = [f"y{i + 1}" for i in range(existentials)]
    if pi2:
        prefix = [("A", v) for v in us] + [("E", v) for v in es]
    else:
        prefix = [("A", v) for v in us] + [("E", v) for v in es]
        rng.shuffle(prefix)
    names = us + es
    consts = sorted(S.named_elements())
    rels = sorted(S.relations)

    def term():
        if consts and rng.random() < const_prob:
            return rng.choice(consts)
        return rng.choice(names) if names else rng.choice(range(S.size))

    out = []
    for _ in range(atoms):
        if eq_prob and rng.random() < eq_prob:
            out.append(EqAtom(term(), term()))
        else:
            R = rng.choice(rels)
            out.append(RelAtom(R, tuple(term() for _ in range(S.relations[R].arity))))
    return PHSentence(tuple(prefix), tuple(out), allow_equality=eq_prob > 0)


def random_adversary(rng: random.Random, size: int, m: int, max_tuples: int | None = None) -> Adversary:
    universe = list(itertools.product(range(size), repeat=m))
    k = rng.randint(1, max_tuples or len(universe))
    return Adversary.of(size, rng.sample(universe, min(k, len(universe))))


def random_adversary_set(rng: random.Random, size: int, m: int, members: int = 3,
                         max_tuples: int | None = None) -> AdversarySet:
    return AdversarySet.of(size, m, [random_adversary(rng, size, m, max_tuples)
                                     for _ in range(rng.randint(1, members))])
