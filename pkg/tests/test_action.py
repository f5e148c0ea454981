from fractions import Fraction

import pytest

from action import (
    ActionContext,
    faithfulness_trials,
    functoriality_trials,
    gcq_series,
    psi_dual_morphism,
    psi_dual_object,
    psi_morphism,
    psi_object,
    relation_matrices,
    separation_rank,
    soundness_trials,
    vacuum_eval,
)
from cache_manager import cache_manager
from diagrams import Morphism, bubble, parse
from error_handler import NotAScalar, ParameterMismatch
from hecke import CyclotomicPoly
from heis_defaults import GENERIC_T, GENERIC_Z
from rewrite import embed, normalize
from symfunc import CCW, PLUS

F_LINEAR = CyclotomicPoly([1, "t^2"])
F_QUADRATIC = CyclotomicPoly([1, "z", "t^2"])


# --- objects ---

@pytest.mark.parametrize(
    "f,word,n,dim",
    [
        (F_LINEAR, "", 2, 2),
        (F_LINEAR, "U", 1, 2),
        (F_QUADRATIC, "U", 0, 2),
        (F_QUADRATIC, "UU", 0, 8),
        (F_QUADRATIC, "DU", 0, 2),
        (F_QUADRATIC, "D", 0, 0),
    ],
)
def test_module_dimensions(f, word, n, dim):
    assert psi_object(word, f, n).dim == dim


def test_dual_action_raises_with_down_strands():
    assert psi_dual_object("D", F_QUADRATIC, 0).dim == 2
    assert psi_dual_object("U", F_QUADRATIC, 0).dim == 0


def test_parameter_must_square_to_the_last_coefficient():
    with pytest.raises(ParameterMismatch):
        ActionContext(CyclotomicPoly([1, "t"]))
    context = ActionContext(F_LINEAR)
    assert context.t == GENERIC_T


# --- morphisms ---

@pytest.mark.parametrize("word", ["U", "UU", "UD"])
def test_identity_acts_as_identity(word):
    matrix = psi_morphism(Morphism.identity(word), F_QUADRATIC, 0)
    assert matrix.entries.is_square
    assert matrix.entries == matrix.entries.eye(matrix.entries.rows)


def test_crossing_is_invertible():
    matrix = psi_morphism(parse("x+"), F_QUADRATIC, 0)
    assert matrix.is_invertible()
    inverse = psi_morphism(parse("x-"), F_QUADRATIC, 0)
    assert (matrix @ inverse).entries == matrix.entries.eye(matrix.entries.rows)


def test_leading_bubble_value():
    value = psi_morphism(bubble(CCW, PLUS, 1), F_LINEAR, 0).scalar()
    assert value == Fraction(GENERIC_T) / Fraction(GENERIC_Z)


def test_scalar_needs_a_one_dimensional_module():
    with pytest.raises(NotAScalar):
        psi_morphism(parse("x+"), F_QUADRATIC, 0).scalar()


@pytest.mark.parametrize("f", [F_LINEAR, F_QUADRATIC])
@pytest.mark.parametrize("n", [0, 1])
def test_core_relations_hold_as_matrices(f, n):
    report = relation_matrices(f, n, ("core",))
    assert report.checked > 0
    assert report.ok, report.failures


def test_dual_action_respects_the_skein_relation():
    lhs = psi_dual_morphism(parse("x+ - x-"), F_QUADRATIC, 0)
    rhs = psi_dual_morphism(parse("[z] 1u * 1u"), F_QUADRATIC, 0)
    assert lhs == rhs


# --- oracles ---

@pytest.mark.parametrize("f,n", [(F_LINEAR, 1), (F_QUADRATIC, 0), (F_QUADRATIC, 1)])
def test_basis_images_are_independent(f, n):
    rank, count = separation_rank(f, n)
    assert rank == count


def test_functoriality():
    report = functoriality_trials(F_LINEAR, trials=3, seed=11)
    assert report.ok, report.failures


def test_soundness():
    report = soundness_trials(F_LINEAR, trials=5, seed=5)
    assert report.checked == 5
    assert report.ok, report.failures


@pytest.mark.parametrize("suite", ["core", "curls", "braid", "bubbles"])
def test_soundness_in_every_suite(suite):
    report = soundness_trials(F_LINEAR, trials=3, seed=17, suites=(suite,))
    assert report.checked == 3
    assert report.ok, report.failures


def test_soundness_counts_rewrite_errors_as_failures():
    cache_manager.clear()
    report = soundness_trials(F_LINEAR, trials=2, seed=5, budget=1)
    assert report.checked == 2
    assert not report.ok


def test_faithfulness():
    report = faithfulness_trials(F_LINEAR, trials=4, seed=3, max_strands=3, max_crossings=2, steps=4)
    assert report.checked == 4
    assert report.ok, report.failures


@pytest.mark.parametrize(
    "text",
    ["(1u * x+) . (dotu(1) * 1u * 1u)", "(1u * x+) . (bub(cw,plain,0) * 1u * 1u * 1u)", "x- . (dotu(2) * 1u)"],
)
def test_normal_forms_act_like_their_diagrams(text):
    m = parse(text)
    straightened = embed(normalize(m, -F_LINEAR.l))
    assert psi_morphism(m, F_LINEAR, 0) == psi_morphism(straightened, F_LINEAR, 0)


# --- full-size sweeps ---

@pytest.mark.slow
@pytest.mark.parametrize("f,n", [(F_LINEAR, 0), (F_LINEAR, 1), (F_LINEAR, 2), (F_QUADRATIC, 0), (F_QUADRATIC, 1)])
def test_functoriality_full_sweep(f, n):
    report = functoriality_trials(f, trials=100, seed=20240917, n=n)
    assert report.checked == 200
    assert report.ok, report.failures


@pytest.mark.slow
@pytest.mark.parametrize("f", [F_LINEAR, F_QUADRATIC])
def test_soundness_full_sweep(f):
    report = soundness_trials(f, trials=500, seed=20240917)
    assert report.checked == 500
    assert report.ok, report.failures


@pytest.mark.slow
@pytest.mark.parametrize("f", [F_LINEAR, F_QUADRATIC])
def test_faithfulness_full_sweep(f):
    report = faithfulness_trials(f, trials=50, seed=20240917)
    assert report.ok, report.failures


# --- generalized cyclotomic quotients ---

@pytest.mark.parametrize("f,g", [([1, "t^2"], [1]), ([1, 0, "t^2"], [1, 1]), ([1, "z", "t^2"], [1])])
def test_gcq_series_are_mutually_inverse(f, g):
    series = gcq_series(f, g, 5)
    assert series.k == len(g) - len(f)
    assert series.check_inverse()


def test_gcq_needs_matching_constants():
    with pytest.raises(ParameterMismatch):
        gcq_series([1, "z"], [1], 3)
    with pytest.raises(ParameterMismatch):
        gcq_series([2, "t^2"], [1], 3)


def test_vacuum_evaluation():
    report = vacuum_eval(Morphism.identity(""), [1, "t^2"], [1], order=3)
    assert report.matches
    assert report.blue == 1
    assert report.red is None


def test_vacuum_evaluation_needs_a_closed_morphism():
    with pytest.raises(NotAScalar):
        vacuum_eval(parse("1u"), [1, "t^2"], [1])
