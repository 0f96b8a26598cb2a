import itertools
import random

import pytest
from hypothesis import given, strategies as st

import oracles as O
from qcsplab.adversaries import Adversary, AdversarySet, generates, xi
from qcsplab.budget import InputError
from qcsplab.classification import (Shop, check_family_preservation, check_zhuk_condition,
                                    classify_pgp_egp, essential_tuples, find_hubie_pol,
                                    find_lemma_fun_witnesses, has_simple_A_she,
                                    invariant_relations, is_alpha_beta_projective, is_essential,
                                    is_essential_by_rho_tilde, is_generalized_hubie_pol,
                                    is_hubie_pol, is_loop_connected, is_quasi_loop_connected,
                                    is_she, make_family_op, path_structure, rho_tilde,
                                    valid_pairs, zero_collapsible_from_source)
from qcsplab.core import Operation, Relation, Structure, preserves
from qcsplab.fixtures import leq_structure
from qcsplab.logic import eval_qcsp, eval_qcsp_restricted
from qcsplab.sampling import random_relation, random_sentence, random_structure

R, S = make_family_op("chen_r"), make_family_op("chen_s")
A02, A12 = {0, 2}, {1, 2}


# ---------------------------------------------------------------- projectivity

def test_projective_frozen():
    assert not is_alpha_beta_projective(R, A02, A12)
    assert is_alpha_beta_projective(S, A02, A12)
    assert O.alpha_beta_projective(O.op_dict(R), 4, A02, A12) is False
    for pair in valid_pairs(3):
        assert is_alpha_beta_projective(Operation.projection(3, 3, 1), *pair)
    with pytest.raises(InputError):
        is_alpha_beta_projective(S, {0}, {1})


def test_valid_pairs_count():
    assert len(valid_pairs(2)) == 1
    assert len(valid_pairs(3)) == 6


@given(st.integers(0, 10 ** 6))
def test_projectivity_agrees_with_oracle(seed):
    rng = random.Random(seed)
    f = Operation(3, 2, [rng.randrange(3) for _ in range(9)])
    for a, b in valid_pairs(3):
        assert is_alpha_beta_projective(f, a, b) == O.alpha_beta_projective(O.op_dict(f), 2, a, b)


def _projective_op(rng, alpha, beta, k):
    """A random k-ary operation that is alpha-beta projective at a random coordinate."""
    i = rng.randrange(k)
    table = []
    for xs in itertools.product(range(3), repeat=k):
        allowed = [v for v in range(3) if (xs[i] not in alpha or v in alpha)
                   and (xs[i] not in beta or v in beta)]
        table.append(rng.choice(allowed))
    return Operation(3, k, table)


@given(st.integers(0, 10 ** 6))
def test_projectivity_closed_under_composition(seed):
    rng = random.Random(seed)
    f = _projective_op(rng, A02, A12, 2)
    g = _projective_op(rng, A02, A12, 3)
    h = Operation.from_function(3, 3, lambda x, y, z: f(g(x, y, z), g(z, x, y)))
    assert is_alpha_beta_projective(h, A02, A12)


def test_classify_chen_is_pgp():
    v = classify_pgp_egp([R, S])
    assert v.outcome == "PGP"
    assert len(v.violators) == 6
    for (a, b), f in v.violators.items():
        assert not is_alpha_beta_projective(f, a, b)


def test_classify_egp_cases():
    proj = [Operation.projection(2, 2, 0)]
    v = classify_pgp_egp(proj)
    assert v.outcome == "EGP" and v.pair == (frozenset({0}), frozenset({1}))
    rng = random.Random(1)
    ops = [_projective_op(rng, A02, A12, k) for k in (2, 3, 2)]
    v = classify_pgp_egp(ops)
    assert v.outcome == "EGP"
    assert all(is_alpha_beta_projective(f, *v.pair) for f in ops)


def test_classify_structure_mode():
    leq = leq_structure()
    assert classify_pgp_egp(leq).outcome == "PGP"


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_chen_pgp_is_two_switchable(m):
    p = min(2, m - 1)
    assert generates(xi(m, p, 3), [R, S])


def test_chen_not_one_switchable_at_three():
    assert not generates(xi(3, 1, 3), [R, S])


# ---------------------------------------------------------------- Hubie-pols

def test_hubie_frozen():
    mx = Operation.from_function(2, 2, max)
    assert is_hubie_pol(mx, 0)
    assert not is_hubie_pol(Operation.projection(3, 2, 0), 1)
    for n in (2, 3):
        assert is_hubie_pol(make_family_op("f_hat_a", n), 1)
    assert is_hubie_pol(make_family_op("f_a", 3), 1)
    diag = Operation.from_function(3, 2, lambda x, y: x if x == y else 0)
    assert not is_hubie_pol(diag, 0) and not is_hubie_pol(diag, 1)


def test_generalized_hubie_on_r():
    found = [z for z in itertools.product((0, 1), repeat=4) if is_generalized_hubie_pol(R, z)]
    assert found == [(0, 0, 1, 1)]
    tab = O.op_dict(R)
    assert found == [z for z in itertools.product((0, 1), repeat=4) if O.hubie(tab, 4, 3, z)]
    for x in range(3):
        assert is_hubie_pol(R, x) == is_generalized_hubie_pol(R, (x,) * 4)


def test_find_hubie_pol():
    leq = leq_structure()
    assert find_hubie_pol(leq, 0).operation.table == (0, 1, 1, 1)
    assert find_hubie_pol(leq, 1).operation.table == (0, 0, 0, 1)
    one_in_three = Structure(2, {"T": Relation(3, [(1, 0, 0), (0, 1, 0), (0, 0, 1)])}).with_constants()
    h = find_hubie_pol(one_in_three, 0)
    assert not h.found and h.exhausted
    fh = make_family_op("f_hat_a", 2)
    assert find_hubie_pol([S, fh], 1).operation == fh


# ---------------------------------------------------------------- shops

def test_shop_invariants():
    with pytest.raises(InputError):
        Shop(({0}, set()))
    with pytest.raises(InputError):
        Shop(({0}, {0}))
    assert Shop(({0, 1}, {1})).is_simple_A_shop()


def test_she_frozen():
    total = Structure(2, {"E": Relation(2, list(itertools.product(range(2), repeat=2)))})
    assert has_simple_A_she(total) is not None
    K2 = Structure(2, {"E": Relation(2, [(0, 1), (1, 0)])})
    assert has_simple_A_she(K2) is None
    assert not any(O.is_she(im, {"E": {(0, 1), (1, 0)}}) for im in O.simple_shops(2))
    assert has_simple_A_she(Structure(1, {"E": Relation(2, [(0, 0)])})) is not None


@given(st.integers(0, 10 ** 6))
def test_she_search_matches_enumeration(seed):
    rng = random.Random(seed)
    Sx = random_structure(rng, size=3, relations=2, max_arity=2, constants=False)
    rels = {n: set(Rl.tuples) for n, Rl in Sx.relations.items()}
    found = has_simple_A_she(Sx)
    assert (found is not None) == any(O.is_she(im, rels) for im in O.simple_shops(3))
    if found is not None:
        assert found.is_simple_A_shop() and is_she(Sx, found)


@given(st.integers(0, 10 ** 6))
def test_simple_she_gives_zero_collapsibility(seed):
    rng = random.Random(seed)
    Sx = random_structure(rng, size=2, relations=2, max_arity=2, density=0.7, constants=False)
    shop = has_simple_A_she(Sx)
    if shop is None:
        return
    x = next(a for a, im in enumerate(shop.images) if len(im) == 2)
    for _ in range(5):
        m = rng.randint(1, 3)
        phi = random_sentence(rng, Sx, m, rng.randint(1, 2), rng.randint(1, 3))
        omega = AdversarySet.of(2, m, [Adversary.of(2, [(x,) * m])])
        if eval_qcsp_restricted(Sx, phi, omega).holds:
            assert eval_qcsp(Sx, phi).holds


def test_zero_collapsible_from_source():
    leq = Structure(2, leq_structure().relations)
    assert zero_collapsible_from_source(leq, [0]) is None      # (0,0) in L forces A x A into L
    assert zero_collapsible_from_source(leq, [1]) is None
    upper = Structure(2, {"U": Relation(2, [(0, 1), (1, 1)])})
    assert zero_collapsible_from_source(upper, [0]) is not None
    with pytest.raises(InputError):
        zero_collapsible_from_source(upper, [])


# ---------------------------------------------------------------- essential relations

def test_essential_frozen():
    ne = Relation(2, [(0, 1), (1, 0)])
    assert essential_tuples(ne, 2) == [(0, 0), (1, 1)]
    assert is_essential(ne, 2) and is_essential_by_rho_tilde(ne, 2)
    full = Relation(2, list(itertools.product(range(2), repeat=2)))
    assert essential_tuples(full, 2) == []
    assert essential_tuples(Relation(2, []), 2) == []
    unary = Relation(1, [(0,)])
    assert not is_essential(unary, 2) and rho_tilde(unary, 2) == unary
    prod = Relation(2, [(a, b) for a in (0, 2) for b in (1, 2)])
    assert rho_tilde(prod, 3) == prod and not is_essential(prod, 3)


@given(st.integers(0, 10 ** 6))
def test_essential_three_routes(seed):
    rng = random.Random(seed)
    size, arity = rng.choice([(2, 2), (2, 3), (3, 2), (3, 3)])
    Rl = random_relation(rng, size, arity, rng.random())
    a = is_essential(Rl, size)
    assert a == is_essential_by_rho_tilde(Rl, size)
    assert a == O.essential_by_definition(Rl.tuples, size, arity)


def test_essential_22_tuple_breaks_s():
    rng = random.Random(0)
    made = 0
    while made < 20:
        Rl = random_relation(rng, 3, 3, 0.5)
        ess = [t for t in essential_tuples(Rl, 3) if t[:2] == (2, 2)]
        if ess:
            made += 1
            assert not preserves(S, Rl)


# ---------------------------------------------------------------- families

def test_family_tables():
    assert (R(0, 1, 1, 1), R(0, 0, 0, 1), R(2, 1, 1, 1)) == (1, 0, 2)
    fa = make_family_op("f_a", 3)
    assert (fa(1, 1, 1, 1), fa(1, 0, 0, 0), fa(0, 1, 1, 0)) == (1, 0, 2)
    assert S(1, 1) == 1 and S(0, 1) == 2
    with pytest.raises(InputError):
        make_family_op("f_a", 2)
    with pytest.raises(InputError):
        make_family_op("f_a", 3, size=4)


@pytest.mark.parametrize("name,n", [("f_a", 3), ("f_a", 4), ("f_hat_a", 2), ("f_hat_a", 3)])
def test_family_swap_and_idempotence(name, n):
    a = make_family_op(name, n)
    b = make_family_op(name[:-1] + "b", n)
    sw = {0: 1, 1: 0, 2: 2}
    assert a.is_idempotent() and b.is_idempotent()
    for xs in itertools.product(range(3), repeat=a.arity):
        assert b(*xs) == sw[a(*[sw[v] for v in xs])]


def test_family_preservation_reports():
    fh = make_family_op("f_hat_a", 2)
    rep = check_family_preservation(fh, [Relation(1, [(0,), (2,)]), Relation(1, [(1,), (2,)])])
    assert rep.all_preserved
    fa = make_family_op("f_a", 3)
    bad = check_family_preservation(fa, [Relation(1, [(0,), (1,)])])
    e = bad.entries[0]
    assert not e.preserved and fa.apply_columns(e.witness) not in e.relation.tuples


def test_invariants_of_chen_preserved_by_hats():
    rels = invariant_relations([R, S], 2, 3)
    assert len(rels) == 99
    for name, n in [("f_hat_a", 2), ("f_hat_b", 2), ("f_a", 3), ("f_b", 3)]:
        rep = check_family_preservation(make_family_op(name, n), rels, from_gap_algebra=True)
        assert rep.in_regime and rep.lemma_consistent


def test_invariant_relations_are_invariant():
    rels = invariant_relations([S], 2, 3)
    assert all(preserves(S, Rl) for Rl in rels)
    every = [Relation(2, ts) for r in range(10)
             for ts in itertools.combinations(list(itertools.product(range(3), repeat=2)), r)]
    assert {Rl.tuples for Rl in rels} == {Rl.tuples for Rl in every if preserves(S, Rl)}


# ---------------------------------------------------------------- Zhuk condition

def test_zhuk_chen():
    z = check_zhuk_condition([R, S])
    assert z.status == "found" and z.regime == 1
    assert (z.r3(0, 0, 1), z.r3(0, 1, 0), z.r3(0, 1, 1)) == (0, 0, 2)
    assert (z.p(0, 1), z.p(0, 2)) == (0, 2)
    assert z.p.table == (0, 0, 2, 2, 1, 2, 2, 2, 2)


def test_zhuk_projections_and_literals():
    proj = [Operation.projection(3, 2, 0), Operation.projection(3, 2, 1)]
    assert check_zhuk_condition(proj).status == "not_found"
    r3 = Operation.from_function(3, 3, lambda x, y, z: {(0, 0, 1): 0, (0, 1, 0): 0}.get((x, y, z), x if x == y == z else 2))
    p = Operation.from_function(3, 2, lambda x, y: x if x == y or (x, y) == (0, 1) else 2)
    z = check_zhuk_condition([r3, p])
    assert z.status == "found" and z.regime == 1


def test_lemma_fun():
    w = find_lemma_fun_witnesses([R, S])
    p1, p2 = w["p1"].operation, w["p2"].operation
    assert (p1(0, 1), p1(1, 0), p1(2, 0)) == (1, 2, 2)
    assert (p2(0, 1), p2(1, 0), p2(1, 2)) == (0, 2, 2)
    proj = [Operation.projection(3, 2, 0)]
    assert {k: v.status for k, v in find_lemma_fun_witnesses(proj).items()} == \
        {"p1": "not_found", "p2": "not_found"}
    direct = find_lemma_fun_witnesses([p1])
    assert direct["p1"].status == "found"


# ---------------------------------------------------------------- paths

def _qlc_strings(L):
    out = set()
    for a in range(L + 1):
        for b in range(1, L + 1):
            if 2 * a + b == L:
                for alpha in itertools.product("01", repeat=a):
                    out.add("0" * a + "1" * b + "".join(alpha))
        for r in (a, a - 1):
            if r >= 0 and a + r == L:
                for alpha in itertools.product("01", repeat=r):
                    out.add("0" * a + "".join(alpha))
    return out


def test_quasi_loop_connected_frozen():
    assert is_quasi_loop_connected("0110")
    assert is_quasi_loop_connected("11")
    assert is_quasi_loop_connected("0")
    assert not is_quasi_loop_connected("0100")


@pytest.mark.parametrize("L", range(0, 9))
def test_quasi_loop_connected_by_construction(L):
    expect = _qlc_strings(L)
    for bits in itertools.product("01", repeat=L):
        b = "".join(bits)
        assert is_quasi_loop_connected(b) == (b in expect)


def test_loop_connected_and_path():
    assert is_loop_connected("0110") and not is_loop_connected("101")
    P = path_structure("101")
    assert P.relations["E"].tuples == {(0, 1), (1, 0), (1, 2), (2, 1), (0, 0), (2, 2)}
