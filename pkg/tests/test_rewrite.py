import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diagrams import Gen, Morphism, ObjectWord, bubble, parse
from error_handler import NonTermination, TypeMismatch
from rewrite import (
    NormalForm,
    all_matchings,
    basis_matchings,
    bent_word,
    Engine,
    bubble_value,
    commute_ops,
    confluence_mismatches,
    crossing_number,
    embed,
    equal_mod_relations,
    functoriality_mismatches,
    lift_morphism,
    normalize,
    random_morphism,
    relation_residual,
    rewrite_measure,
    valid_matching,
)
from symfunc import CCW, CW, MINUS, PLUS, SymSym

K_VALUES = [-2, -1, 0, 1, 2]


# --- matchings ---

def test_bent_word_of_an_endomorphism():
    assert bent_word(ObjectWord("UD"), ObjectWord("UD")) == ("U", "D", "U", "D")


def test_matchings_pair_opposite_letters():
    word = ("U", "D", "U", "D")
    matchings = all_matchings(word)
    assert len(matchings) == 2
    assert all(valid_matching(word, m) for m in matchings)
    assert not valid_matching(word, (2, 3, 0, 1))


def test_basis_of_up_up_endomorphisms():
    matchings = basis_matchings("UU", "UU")
    assert len(matchings) == 2
    assert sorted(crossing_number(m) for m in matchings) == [0, 1]


# --- normal forms ---

@pytest.mark.parametrize("k", K_VALUES)
def test_identity_is_a_single_basis_vector(k):
    nf = normalize(Morphism.identity("UU"), k)
    assert len(nf) == 1
    [(_, value)] = nf.items()
    assert value == SymSym.one()


@pytest.mark.parametrize("k", K_VALUES)
def test_quadratic_relation(k):
    residual = relation_residual(parse("x+ . x+"), parse("[z] x+ + 1u * 1u"), k)
    assert residual.is_zero()
    assert residual.render() == "0"


@pytest.mark.parametrize("k", K_VALUES)
def test_negative_crossing_inverts(k):
    assert equal_mod_relations(parse("x- . x+"), Morphism.identity("UU"), k)
    assert not equal_mod_relations(parse("x+"), Morphism.identity("UU"), k)


@pytest.mark.parametrize("k", K_VALUES)
@pytest.mark.parametrize("orientation,sign", [(CCW, PLUS), (CW, PLUS), (CCW, MINUS), (CW, MINUS)])
def test_bubbles_evaluate_to_their_dictionary_value(k, orientation, sign):
    label = 1
    nf = normalize(bubble(orientation, sign, label), k)
    assert nf.scalar() == bubble_value(orientation, sign, label, k)


@pytest.mark.parametrize("source,target", [("UU", "UU"), ("UD", "UD"), ("", "DU"), ("UD", "")])
def test_canonical_lifts_normalize_to_basis_vectors(source, target):
    for partner in basis_matchings(source, target):
        nf = normalize(lift_morphism(partner, source, target), 0)
        assert len(nf) == 1
        assert nf.coefficient(partner) == SymSym.one()


@pytest.mark.parametrize("k", [-1, 0, 1])
def test_embedding_inverts_normalization(k):
    nf = normalize(parse("[z] x+ . (dotu(1) * 1u) + (1u * dotu(2)) . x-"), k)
    assert normalize(embed(nf), k) == nf


@pytest.mark.parametrize("k", [-1, 0, 1])
@pytest.mark.parametrize(
    "crossed,dotted_first",
    [
        ("(1u * x+) . (dotu(1) * 1u * 1u)", "(dotu(1) * 1u * 1u) . (1u * x+)"),
        ("(1u * 1u * x+) . (dotu(1) * 1u * 1u * 1u)", "(dotu(1) * 1u * 1u * 1u) . (1u * 1u * x+)"),
        ("(1u * x+) . (dotu(2) * 1u * 1u)", "(dotu(2) * 1u * 1u) . (1u * x+)"),
    ],
)
def test_dots_on_other_strands_survive_a_crossing(k, crossed, dotted_first):
    nf = normalize(parse(crossed), k)
    assert not nf.is_zero()
    assert all(any(dots) for (_, dots), _ in nf.items())
    assert nf == normalize(parse(dotted_first), k)


@pytest.mark.parametrize("k", [-1, 0, 1])
def test_bubbles_below_a_crossing_are_kept(k):
    nf = normalize(parse("(1u * x+) . (bub(cw,plain,0) * 1u * 1u * 1u)"), k)
    assert nf == normalize(parse("(bub(cw,plain,0) * 1u * 1u * 1u) . (1u * x+)"), k)


def test_normal_forms_check_boundaries():
    a = normalize(Morphism.identity("U"), 0)
    b = normalize(Morphism.identity("D"), 0)
    with pytest.raises(TypeMismatch):
        a + b


def test_normal_form_arithmetic():
    nf = normalize(parse("x+"), 0)
    assert (nf - nf).is_zero()
    assert nf + nf == nf.scale(2)
    data = nf.to_dict()
    assert (data["source"], data["target"], data["k"]) == ("UU", "UU", 0)


def test_budget_exhaustion_raises():
    f = parse("x+ . (dotu(3) * 1u) . x+ . x+")
    with pytest.raises(NonTermination):
        normalize(f, 0, budget=1, seed=424242)


def test_normal_form_is_an_object_of_its_own():
    nf = NormalForm(ObjectWord("U"), ObjectWord("U"))
    assert nf.is_zero() and len(nf) == 0


# --- confluence ---

@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10 ** 6))
def test_random_morphisms_respect_bounds(seed):
    f = random_morphism(random.Random(seed))
    for d, _ in f.items():
        assert len(d.source) <= 4
        assert d.count(Gen.CROSS_POS, Gen.CROSS_NEG) <= 6
        assert d.count(Gen.BUBBLE) <= 2


@pytest.mark.parametrize("k", [-1, 0, 1])
def test_rule_order_does_not_change_normal_forms(k):
    assert confluence_mismatches(k, samples=5, seed=7, max_strands=3, max_crossings=3, steps=5) == []


@pytest.mark.slow
@pytest.mark.parametrize("k", [-1, 0, 1])
def test_rule_order_does_not_change_normal_forms_full_sweep(k):
    assert confluence_mismatches(k, samples=200, seed=20240917) == []


@pytest.mark.parametrize("k", [-1, 0, 1])
def test_normalizing_factors_first_does_not_change_composites(k):
    assert functoriality_mismatches(k, pairs=4, seed=13, max_strands=3, max_crossings=2, steps=4) == []


@pytest.mark.slow
@pytest.mark.parametrize("k", [-1, 0, 1])
def test_normalizing_factors_first_full_sweep(k):
    assert functoriality_mismatches(k, pairs=100, seed=20240917) == []


def test_random_morphisms_can_start_from_a_given_word():
    f = random_morphism(random.Random(4), source=ObjectWord("UD"), steps=3)
    assert f.source == ObjectWord("UD")


# --- rule order and termination ---

def test_ops_on_disjoint_strands_commute():
    assert commute_ops(("dot", 0, 2), ("x", 2)) == (("x", 2), ("dot", 0, 2))
    assert commute_ops(("cup", 0, ("D", "U")), ("dot", 3, 1)) == (("dot", 1, 1), ("cup", 0, ("D", "U")))
    assert commute_ops(("cap", 3), ("dot", 0, 1)) == (("dot", 0, 1), ("cap", 3))
    assert commute_ops(("x", 0), ("dot", 1, 1)) is None
    assert commute_ops(("bub", 2, None), ("cup", 2, ("U", "D"))) is None


def test_seeded_engines_reorder_slices():
    ops = [("dot", 0, 1), ("dot", 2, 1), ("dot", 4, 1), ("dot", 6, 1)]
    orders = {tuple(Engine(0, seed=seed).interchange(ops)) for seed in range(20)}
    assert len(orders) > 1
    assert all(sorted(order) == sorted(ops) for order in orders)


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_seeded_normal_forms_match_unseeded(seed):
    f = parse("(dotu(1) * 1u * dotu(-1)) . (1u * 1u * dotu(2)) . (x+ * 1u) . (1u * x-)")
    assert normalize(f, 0, seed=seed) == normalize(f, 0)


def test_measure_orders_crossings_before_dots():
    word = ("D", "U", "D", "U")
    assert rewrite_measure(word, ("xneg", 1), (3, 2, 1, 0)) == (1, 1, 0, 0, 0)
    assert rewrite_measure(word, ("dot", 0, 1), (3, 2, 1, 0)) == (0, 0, 3, 0, 0)
    assert rewrite_measure(word, ("bub", 1, None), (1, 0, 3, 2)) == (0, 0, 0, 3, 0)
    assert rewrite_measure(("U", "D", "D", "U"), ("cap", 1), (2, 3, 0, 1)) == (0, 1, 0, 0, 1)


@pytest.mark.parametrize("k", [-1, 0, 1])
def test_debug_mode_checks_every_step(k):
    f = parse("[z] x+ . (dotu(1) * 1u) + (1u * dotu(2)) . x- . x-")
    assert normalize(f, k, debug=True) == normalize(f, k)


@settings(max_examples=10, deadline=None)
@given(st.integers(min_value=0, max_value=10 ** 6))
def test_debug_mode_accepts_random_diagrams(seed):
    f = random_morphism(random.Random(seed), max_strands=3, max_crossings=3, steps=5)
    assert normalize(f, 0, debug=True) == normalize(f, 0)
