import itertools
import random

import pytest
from hypothesis import given, strategies as st

import oracles as O
from qcsplab.adversaries import Adversary, AdversarySet
from qcsplab.budget import Budget, BudgetExceeded, InputError
from qcsplab.core import Relation, Structure
from qcsplab.fixtures import k4, k4_sentence
from qcsplab.logic import (check_verdict, eval_csp, eval_qcsp, eval_qcsp_restricted,
                           parse_sentence)
from qcsplab.sampling import random_adversary_set, random_sentence, random_structure


def test_k4_existential_example():
    S = k4()
    phi = parse_sentence("E z : E(c0,z) & E(c1,z) & E(c2,z)", S)
    v = eval_csp(S, phi)
    assert v.holds and v.skolem[0]["z"][()] == 3


def test_k4_remark():
    S, phi = k4(), k4_sentence()
    v = eval_qcsp(S, phi)
    assert not v.holds and v.play == (0, 0, 1)
    assert check_verdict(S, phi, v)
    singles = AdversarySet.of(4, 3, [Adversary.of(4, [t]) for t in itertools.product(range(4), repeat=3)])
    assert len(singles.members) == 64
    r = eval_qcsp_restricted(S, phi, singles)
    assert r.holds and check_verdict(S, phi, r, singles)
    assert not eval_qcsp_restricted(S, phi, singles.union()).holds


def test_two_clique_and_empty_matrix():
    S = Structure(2, {"E": Relation(2, [(0, 1), (1, 0)])})
    assert eval_qcsp(S, parse_sentence("E x E y : E(x,y)", S)).holds
    assert eval_qcsp(S, parse_sentence("A x : true", S)).holds
    assert not eval_qcsp(S, parse_sentence("A x A y : E(x,y)", S)).holds


def test_parse_errors():
    S = k4()
    with pytest.raises(InputError):
        parse_sentence("A x : E(x,y)", S)
    with pytest.raises(InputError):
        parse_sentence("A x E x : E(x,x)", S)
    with pytest.raises(InputError):
        parse_sentence("A x E y : x=y", S, allow_equality=False)
    with pytest.raises(InputError):
        parse_sentence("A x E y E(x,y)", S)


def test_text_roundtrip():
    S = k4()
    phi = parse_sentence("A x E y : E(x,y) & y=c2 & E(y,3)", S)
    assert parse_sentence(phi.text(S), S) == phi


def test_adversary_length_mismatch_and_empty():
    S, phi = k4(), k4_sentence()
    with pytest.raises(InputError):
        eval_qcsp_restricted(S, phi, [frozenset({(0, 0)})])
    assert eval_qcsp_restricted(S, phi, []).holds


def test_budget_exceeded():
    S, phi = k4(), k4_sentence()
    with pytest.raises(BudgetExceeded):
        eval_qcsp(S, phi, Budget(search_nodes=3))


@given(st.integers(0, 10 ** 6))
def test_eval_matches_naive_recursion(seed):
    rng = random.Random(seed)
    S = random_structure(rng, size=2, relations=2, max_arity=3)
    phi = random_sentence(rng, S, rng.randint(0, 3), rng.randint(0, 3), rng.randint(1, 4),
                          eq_prob=0.15)
    size, rels = O.structure_parts(S)
    prefix, atoms = O.sentence_parts(phi)
    v = eval_qcsp(S, phi)
    assert v.holds == O.eval_game(size, rels, prefix, atoms)
    assert check_verdict(S, phi, v)


@given(st.integers(0, 10 ** 6))
def test_restricted_matches_naive_recursion(seed):
    rng = random.Random(seed)
    S = random_structure(rng, size=2, relations=2, max_arity=2)
    m = rng.randint(1, 3)
    phi = random_sentence(rng, S, m, rng.randint(1, 2), rng.randint(1, 4))
    omega = random_adversary_set(rng, 2, m)
    size, rels = O.structure_parts(S)
    prefix, atoms = O.sentence_parts(phi)
    v = eval_qcsp_restricted(S, phi, omega)
    assert v.holds == O.eval_restricted(size, rels, prefix, atoms,
                                        [B.tuples for B in omega.members])
    assert check_verdict(S, phi, v, omega)


def test_tampered_witness_is_rejected():
    S = k4()
    phi = parse_sentence("A x E y : E(x,y)", S)
    v = eval_qcsp(S, phi)
    table = dict(v.skolem[0]["y"])
    key = next(iter(table))
    table[key] = key[0]
    bad = type(v)(True, skolem=({"y": table},))
    assert not check_verdict(S, phi, bad)
