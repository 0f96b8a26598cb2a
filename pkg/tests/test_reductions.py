import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

import oracles as O
from qcsplab.adversaries import Adversary, AdversarySet
from qcsplab.budget import InputError
from qcsplab.classification import is_alpha_beta_projective, make_family_op
from qcsplab.core import Operation, Relation, Structure, preserves
from qcsplab.core.relations import materialize
from qcsplab.logic import eval_qcsp, parse_sentence
from qcsplab.reductions import (ALPHA, BETA, NAEInstance, block_relation, check_closure,
                                conp_eval, find_canon, is_canon, nae_satisfiable,
                                naesat_complement_reduction, near_unanimity_for_reduct,
                                pp_define_tau_in_sigma, pp_definition, qcsp_to_csp, sigma_k,
                                solve_csp_instance, tau_k, tau_structure, tuple_count)
from qcsplab.sampling import random_adversary_set, random_sentence, random_structure


# ---------------------------------------------------------------- qcsp_to_csp

def _csp_agrees(seed):
    rng = random.Random(seed)
    S = random_structure(rng, size=2, relations=2, max_arity=3)
    m = rng.randint(1, 3)
    phi = random_sentence(rng, S, m, rng.randint(0, 3), rng.randint(1, 4), eq_prob=0.1)
    omega = random_adversary_set(rng, 2, m, members=3)
    inst = qcsp_to_csp(S, phi, omega)
    sat = solve_csp_instance(inst) is not None
    size, rels = O.structure_parts(S)
    prefix, atoms = O.sentence_parts(phi)
    expect = O.eval_restricted(size, rels, prefix, atoms, [B.tuples for B in omega.members])
    return sat, expect, inst, phi, omega


@given(st.integers(0, 10 ** 6))
def test_csp_reduction_matches_restricted_game(seed):
    sat, expect, _, _, _ = _csp_agrees(seed)
    assert sat == expect


@given(st.integers(0, 10 ** 6))
def test_csp_solution_checks_out(seed):
    sat, _, inst, _, _ = _csp_agrees(seed)
    if not sat:
        return
    sol = solve_csp_instance(inst)
    rels = {n: R.tuples for n, R in inst.structure.relations.items()}
    for rel, args in inst.atoms:
        vals = tuple(a[1] if isinstance(a, tuple) else sol[a] for a in args)
        assert (vals[0] == vals[1]) if rel == "=" else vals in rels[rel]


@given(st.integers(0, 10 ** 6))
def test_csp_size_is_linear_in_width(seed):
    _, _, inst, phi, omega = _csp_agrees(seed)
    per_tuple = len(phi.existentials) + sum(max(len(a.args), 1) for a in phi.atoms)
    assert inst.size <= sum(len(B.tuples) for B in omega.members) * per_tuple


def test_csp_split_and_sharing():
    S = Structure(2, {"E": Relation(2, [(0, 1), (1, 0)])}).with_constants()
    phi = parse_sentence("A x E y A z : E(x,y) & E(z,y)", S)
    omega = AdversarySet.of(2, 2, [Adversary.of(2, [(0, 0), (0, 1)]), Adversary.of(2, [(1, 1)])])
    parts = qcsp_to_csp(S, phi, omega, split=True)
    assert [len(p.variables) for p in parts] == [1, 1]       # y depends on x only
    joined = qcsp_to_csp(S, phi, omega)
    assert len(joined.variables) == 2 and solve_csp_instance(joined) is None
    single = AdversarySet.of(2, 2, [Adversary.of(2, [(0, 0)])])
    assert solve_csp_instance(qcsp_to_csp(S, phi, single)) == {0: 1}


def test_csp_no_universals():
    S = Structure(2, {"E": Relation(2, [(0, 1)])}).with_constants()
    phi = parse_sentence("E x E y : E(x,y)", S)
    inst = qcsp_to_csp(S, phi, AdversarySet.of(2, 0, [Adversary.of(2, [()])]))
    assert solve_csp_instance(inst) == {0: 0, 1: 1}
    assert eval_qcsp(S, inst.as_sentence()).holds


def test_csp_input_errors():
    S = Structure(2, {"E": Relation(2, [(0, 1)])})
    phi = parse_sentence("A x E y : E(x,y)", S.with_constants())
    om = AdversarySet.of(2, 1, [Adversary.of(2, [(0,)])])
    with pytest.raises(InputError):
        qcsp_to_csp(S, phi, om)                               # no constants
    with pytest.raises(InputError):
        qcsp_to_csp(S.with_constants(), phi, AdversarySet.of(2, 2, [Adversary.of(2, [(0, 0)])]))
    with pytest.raises(InputError):
        qcsp_to_csp(S.with_constants(), phi, AdversarySet.of(3, 1, [Adversary.of(3, [(0,)])]))


# ---------------------------------------------------------------- sigma / tau

def test_sigma_tau_frozen():
    assert tuple_count(ALPHA, BETA, 1, 2) == 7
    assert [tuple_count(ALPHA, BETA, k, 3) for k in (1, 2, 3)] == [15, 585, 17955]
    assert [sigma_k(ALPHA, BETA, k).atom_count() for k in (1, 2, 3)] == [16, 32, 48]
    assert [tau_k(ALPHA, BETA, k).atom_count() for k in (1, 2, 3)] == [48, 96, 144]
    assert block_relation(ALPHA, BETA, 0, 3) == Relation(0, [])


@pytest.mark.parametrize("k,width", [(1, 2), (2, 2), (1, 3), (2, 3)])
def test_block_relation_three_routes(k, width):
    R = block_relation(ALPHA, BETA, k, width)
    expr = (sigma_k if width == 2 else tau_k)(ALPHA, BETA, k)
    assert materialize(expr, 3).tuples == R.tuples
    assert len(R.tuples) == tuple_count(ALPHA, BETA, k, width)
    if width == 3:
        assert R.tuples == O.tau_set(k, ALPHA, BETA)


def test_bad_pairs_rejected():
    with pytest.raises(InputError):
        sigma_k({0}, {1}, 1)
    with pytest.raises(InputError):
        tau_k({0, 1, 2}, {1}, 1)


def _projective_op(rng, alpha, beta, k):
    i = rng.randrange(k)
    table = []
    for xs in itertools.product(range(3), repeat=k):
        allowed = [v for v in range(3) if (xs[i] not in alpha or v in alpha)
                   and (xs[i] not in beta or v in beta)]
        table.append(rng.choice(allowed))
    return Operation(3, k, table)


@pytest.mark.parametrize("k", [1, 2])
def test_tau_preserved_by_s(k):
    s = make_family_op("chen_s")
    # s is projective for ({0,2},{1,2}) only, so it preserves exactly that tau family
    assert preserves(s, block_relation({0, 2}, {1, 2}, k, 3))
    assert not preserves(s, block_relation(ALPHA, BETA, k, 3))


@settings(max_examples=12)
@given(st.integers(0, 10 ** 6), st.sampled_from([1, 2]))
def test_tau_preserved_by_projective_ops(seed, k):
    rng = random.Random(seed)
    alpha, beta = rng.choice([(ALPHA, BETA), ({0, 2}, {1, 2}), ({0, 1}, {0, 2})])
    f = _projective_op(rng, alpha, beta, 3 if k == 1 else 2)
    assert is_alpha_beta_projective(f, alpha, beta)
    assert preserves(f, block_relation(alpha, beta, k, 3))


# ---------------------------------------------------------------- pp-definition

@pytest.mark.parametrize("k", [1, 2])
def test_pp_definition_exact(k):
    rep = pp_define_tau_in_sigma(k)
    assert rep.equal and rep.phi_size == rep.tau_size == tuple_count(ALPHA, BETA, k, 3)
    assert len(pp_definition(k).conjuncts) == 3 ** k
    assert {tuple(t) for t in O.pp_phi(k, ALPHA, BETA)} == block_relation(ALPHA, BETA, k, 3).tuples


def test_pp_definition_dropped_conjunct_fails():
    rep = pp_define_tau_in_sigma(2, drop=[4])
    assert not rep.equal and rep.extra and not rep.missing
    for t in rep.extra:
        assert t not in block_relation(ALPHA, BETA, 2, 3).tuples
    assert pp_definition(1).text() == "sigma1(x1,x2) & sigma1(x2,x3) & sigma1(x1,x3)"


# ---------------------------------------------------------------- 3NAESAT

def _check_nae(I):
    phi, S = naesat_complement_reduction(I)
    v = eval_qcsp(S, phi)
    sat = nae_satisfiable(I)
    assert v.holds == (not sat)
    if not v.holds:
        # map the falsifying play back: 0 -> false, 2 -> true, 1 -> either
        for one in (0, 1):
            bits = [0 if a == 0 else 1 if a == 2 else one for a in v.play]
            assert all(len({bits[x] for x in c}) > 1 for c in I.clauses)
    return sat


def test_nae_frozen():
    assert _check_nae(NAEInstance(3, [(0, 1, 2)]))
    assert _check_nae(NAEInstance(3, []))
    assert not _check_nae(NAEInstance(1, [(0, 0, 0)]))
    assert _check_nae(NAEInstance(2, [(0, 0, 1), (0, 1, 1), (1, 0, 0)]))


def test_nae_satisfying_assignment_refutes_psi():
    I = NAEInstance(4, [(0, 1, 2), (1, 2, 3), (0, 2, 3)])
    phi, S = naesat_complement_reduction(I)
    R = S.relations["tau3"].tuples
    for bits in itertools.product((0, 1), repeat=4):
        nae = all(len({bits[x] for x in c}) > 1 for c in I.clauses)
        play = [0 if b == 0 else 2 for b in bits]
        args = tuple(play[x] for c in I.clauses for x in c)
        assert (args not in R) == nae


@pytest.mark.parametrize("n", [1, 2, 3])
def test_nae_exhaustive_small(n):
    triples = list(itertools.product(range(n), repeat=3))
    for r in range(3):
        for cs in itertools.combinations_with_replacement(triples, r):
            _check_nae(NAEInstance(n, cs))


def test_nae_size_linear():
    rng = random.Random(3)
    for k in range(1, 4):
        I = NAEInstance(4, [tuple(rng.randrange(4) for _ in range(3)) for _ in range(k)])
        phi, S = naesat_complement_reduction(I)
        assert sum(len(a.args) for a in phi.atoms) == 3 * k
        assert S.relations[f"tau{k}"].source.atom_count() == 48 * k
    assert tau_k(ALPHA, BETA, 9).atom_count() == 9 * tau_k(ALPHA, BETA, 1).atom_count()


def test_nae_errors():
    with pytest.raises(InputError):
        NAEInstance(2, [(0, 1)])
    with pytest.raises(InputError):
        naesat_complement_reduction(NAEInstance(1, [(0, 0, 0)]), {0, 1}, {0, 1, 2})


# ---------------------------------------------------------------- co-NP evaluation

def _canon_closed(rng, size, arity, c):
    ts = {t for t in itertools.product(range(size), repeat=arity) if rng.random() < 0.25}
    out = set()
    for t in ts:
        for mask in itertools.product((False, True), repeat=arity):
            out.add(tuple(c if m else v for v, m in zip(t, mask)))
    return Relation(arity, out)


def test_canon_frozen():
    taus = [block_relation(ALPHA, BETA, k, 3) for k in (1, 2)]
    assert find_canon(taus, 3) == 1
    assert is_canon(1, taus) and not is_canon(0, taus)
    assert O.canon([R.tuples for R in taus], 3) == 1
    assert find_canon([Relation(2, [(0, 1), (1, 0)])], 2) is None


@given(st.integers(0, 10 ** 6))
def test_find_canon_matches_oracle(seed):
    rng = random.Random(seed)
    rels = [Relation(2, [t for t in itertools.product(range(3), repeat=2) if rng.random() < 0.7])]
    assert find_canon(rels, 3) == O.canon([R.tuples for R in rels], 3)


def test_conp_hand_cases():
    S = tau_structure([1, 2])
    cases = {
        "A x A y A z : tau1(x,y,z)": False,
        "A x E y : tau1(x,y,y)": True,
        "A x A y E z : tau1(x,y,z) & tau2(x,y,z,z,z,z)": False,
        "A x E y E z : tau1(x,y,z) & tau2(x,y,z,z,z,z)": True,
        "A x E y : tau1(x,y,2) & y=0": False,
        "E y A x : tau1(y,x,1) & y=x": False,
        "E y A x : tau2(x,x,x,y,0,2)": True,
        "A x : tau1(x,x,x)": True,
    }
    for text, expect in cases.items():
        phi = parse_sentence(text, S)
        assert eval_qcsp(S, phi).holds == expect, text
        assert conp_eval(S, phi).holds == expect, text


@given(st.integers(0, 10 ** 6))
def test_conp_matches_game_on_tau(seed):
    rng = random.Random(seed)
    S = tau_structure([1, 2])
    phi = random_sentence(rng, S, rng.randint(1, 3), rng.randint(0, 3), rng.randint(1, 3),
                          const_prob=0.2, eq_prob=0.15)
    assert conp_eval(S, phi).holds == eval_qcsp(S, phi).holds


@given(st.integers(0, 10 ** 6))
def test_conp_matches_game_on_random_trivial(seed):
    rng = random.Random(seed)
    size = rng.choice([2, 3])
    c = rng.randrange(size)
    S = Structure(size, {f"R{i}": _canon_closed(rng, size, rng.randint(1, 3), c)
                         for i in range(2)}).with_constants()
    if not all(R.tuples for R in S.relations.values()):
        return
    phi = random_sentence(rng, S, rng.randint(1, 3), rng.randint(0, 3), rng.randint(1, 3),
                          const_prob=0.2, eq_prob=0.15)
    size_, rels = O.structure_parts(S)
    prefix, atoms = O.sentence_parts(phi)
    assert conp_eval(S, phi, canon=c).holds == O.eval_game(size_, rels, prefix, atoms)


def test_conp_rejects_without_canon():
    S = Structure(2, {"E": Relation(2, [(0, 1), (1, 0)])})
    with pytest.raises(InputError):
        conp_eval(S, parse_sentence("A x E y : E(x,y)", S))


def test_check_closure():
    taus = [block_relation(ALPHA, BETA, k, 3) for k in (1, 2)]
    msgs = check_closure(taus, 3)
    assert msgs and all("new" in m for m in msgs)
    full = Relation(2, list(itertools.product(range(2), repeat=2)))
    assert check_closure([full], 2) == []


# ---------------------------------------------------------------- near-unanimity

@pytest.mark.parametrize("m", [1, 2])
def test_nu_preserves_sigma(m):
    rep = near_unanimity_for_reduct(m)
    f = rep.operation
    assert rep.ok and rep.a == 1 and f.arity == 3 * m + 1
    assert f(*([0] * f.arity)) == 0 and f(*([2] + [0] * (f.arity - 1))) == 0
    assert f(*([0, 2] + [1] * (f.arity - 2))) == 1


@pytest.mark.parametrize("a", [0, 2])
def test_nu_guard_outside_common(a):
    with pytest.raises(InputError):
        near_unanimity_for_reduct(1, a=a)
    rep = near_unanimity_for_reduct(1, a=a, check_a=False)
    assert not rep.ok
    w = rep.witnesses[1]
    img = rep.operation.apply_columns(w)
    assert img not in block_relation(ALPHA, BETA, 1, 2).tuples


def test_nu_errors():
    with pytest.raises(InputError):
        near_unanimity_for_reduct(0)
