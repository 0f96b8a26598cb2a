import pytest

from qcsplab.adversaries import Adversary, AdversarySet, upsilon, verify_reactive, xi
from qcsplab.budget import Budget, BudgetExceeded, InputError
from qcsplab.canonical import (canonical_general, canonical_pi2, consistent_maps,
                               decide_p_collapsible_singleton, is_conservative_on)
from qcsplab.classification import is_hubie_pol, path_structure
from qcsplab.core import Operation, preserves_structure
from qcsplab.fixtures import leq_structure
from qcsplab.logic import eval_qcsp


def test_pi2_full_square():
    S = leq_structure()
    omega = AdversarySet.of(2, 2, [Adversary.full(2, 2)])
    canon = canonical_pi2(omega, S)
    assert canon.product_arity == 4 and canon.product_size == 16
    assert eval_qcsp(S, canon.sentence).holds


def test_pi2_same_sentence_for_tuple_union():
    S = leq_structure()
    omega = xi(2, 1, 2)
    assert canonical_pi2(omega, S).sentence == canonical_pi2(omega.union(), S).sentence


def test_degenerate_rejected():
    S = leq_structure()
    with pytest.raises(InputError):
        canonical_pi2(AdversarySet.of(2, 2, [Adversary.of(2, [(0, 0), (1, 1)])]), S)


def test_general_m1_full():
    S = leq_structure()
    omega = AdversarySet.of(2, 1, [Adversary.full(2, 1)])
    canon = canonical_general(2, omega, S)
    assert len(consistent_maps(2, Adversary.full(2, 1))) == 4
    assert eval_qcsp(S, canon.sentence).holds


def test_general_singleton_member():
    S = leq_structure()
    omega = AdversarySet.of(2, 1, [Adversary.of(2, [(0,)])])
    canon = canonical_general(2, omega, S)
    assert canon.coords == ((0, 0),)
    assert not eval_qcsp(S, canon.sentence).holds


def test_collapsible_leq_exact():
    S = leq_structure()
    v = decide_p_collapsible_singleton(S, 0, 1)
    assert v.holds and v.method == "canonical" and v.product_arity == 7
    assert preserves_structure(v.operation, S)
    assert is_hubie_pol(v.operation, 0)
    assert verify_reactive(Adversary.full(2, 2), upsilon(2, 1, [0], 2), v.witness)


def test_collapsible_path_by_nu_certificate():
    S = path_structure("110")
    for x in range(3):
        v = decide_p_collapsible_singleton(S, x, 2)
        assert v.holds and v.method == "nu-closure"


def test_collapsible_errors():
    S = leq_structure()
    with pytest.raises(InputError):
        decide_p_collapsible_singleton(S, 0, 0)
    with pytest.raises(BudgetExceeded):
        decide_p_collapsible_singleton(path_structure("010"), 0, 2, Budget(product_atoms=10),
                                       helper_ops=[])


def test_conservative():
    mx = Operation.from_function(3, 2, max)
    assert is_conservative_on([mx], [0, 1, 2])
    assert not is_conservative_on([Operation.from_function(3, 2, lambda x, y: (x + y) % 3)], [1, 2])
