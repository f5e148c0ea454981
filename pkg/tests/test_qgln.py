from fractions import Fraction

import pytest
import sympy

from error_handler import NoHighestWeightVector, ParameterMismatch, TypeMismatch
from qgln import (
    Operator,
    cap,
    central_character,
    central_character_check,
    central_z,
    center_report,
    crossing,
    cup,
    hc_table,
    heis0_functor_check,
    parse_word,
    rcheck_report,
    rmatrix,
    root_vector,
    tensor_module,
    xy_operator,
)

Q = Fraction(2)
ONE_POINT = (Q,)


def _unit(n, i, j):
    out = sympy.zeros(n, n)
    out[i - 1, j - 1] = 1
    return out


# --- modules ---

def test_words_and_dimensions():
    assert parse_word("+-") == ("+", "-")
    assert parse_word("1") == ()
    assert tensor_module(2, "+-+", Q).dim == 8
    assert tensor_module(3, "", Q).dim == 1


@pytest.mark.parametrize("bad", ["+x", "ab"])
def test_word_letters_are_checked(bad):
    with pytest.raises(ParameterMismatch):
        parse_word(bad)


def test_q_must_be_generic():
    with pytest.raises(ParameterMismatch):
        tensor_module(2, "+", 1)


def test_weights():
    module = tensor_module(2, "+-", Q)
    assert module.weight((1, 1)) == (0, 0)
    assert module.weight((1, 2)) == (1, -1)
    assert len(module.weight_space((0, 0))) == 2


# --- root vectors ---

def test_higher_root_vectors_on_the_natural_module():
    plus = tensor_module(3, "+", Q)
    minus = tensor_module(3, "-", Q)
    assert root_vector("e", 1, 3, plus).matrix == _unit(3, 1, 3)
    assert root_vector("f", 1, 3, minus).matrix == -sympy.Rational(1, 2) * _unit(3, 1, 3)


def test_root_vector_indices_are_checked():
    with pytest.raises(ParameterMismatch):
        root_vector("e", 2, 2, tensor_module(2, "+", Q))
    with pytest.raises(ParameterMismatch):
        root_vector("g", 1, 2, tensor_module(2, "+", Q))


# --- operators ---

def test_operators_check_shapes():
    plus = tensor_module(2, "+", Q)
    with pytest.raises(TypeMismatch):
        Operator.endo(plus, sympy.eye(3))
    with pytest.raises(TypeMismatch):
        Operator.identity(plus) @ Operator.identity(tensor_module(2, "-", Q))


def test_positive_crossing_on_the_natural_module():
    s, s_inv = crossing(2, Q)
    q = sympy.Rational(2)
    z = q - 1 / q
    assert s.matrix[0, 0] == q
    assert s.matrix[1, 2] == 1
    assert s.matrix[2, 2] == z
    assert (s @ s_inv).is_identity()


def test_rmatrix_side_is_checked():
    with pytest.raises(ParameterMismatch):
        rmatrix("Sideways", tensor_module(2, "+", Q))


@pytest.mark.parametrize("kind", ["-+", "+-"])
def test_bubble_is_the_quantum_integer(kind):
    value = (cap(kind, 2, Q) @ cup(kind, 2, Q)).matrix[0, 0]
    assert value == sympy.Rational(2) + sympy.Rational(1, 2)


def test_z_zero_is_the_quantum_dimension():
    module = tensor_module(2, "+-", Q)
    assert central_z(0, module).matrix == sympy.Rational(5, 2) * module.identity()


# --- reports ---

def test_rmatrix_report():
    report = rcheck_report(2, length=1, q_points=ONE_POINT)
    assert report.checked > 0
    assert report.ok, report.failures


@pytest.mark.parametrize("n", [1, 2])
def test_center_report(n):
    report = center_report(n, mmax=1, length=1, q_points=ONE_POINT)
    assert report.ok, report.failures


def test_heis0_functor():
    report = heis0_functor_check(2, q_points=ONE_POINT, length=1, mmax=1)
    assert report.checked > 0
    assert report.ok, report.failures


# --- central characters ---

@pytest.mark.parametrize("size", [0, 1, 2])
def test_central_character_in_rank_one(size):
    row = central_character(2, 1, (size,), q=Q)
    assert row.observed == Q ** (4 * size)
    assert row.matches


def test_hc_table_rows_match():
    rows = hc_table(2, 1, q=Q, max_size=2)
    assert [row.weight for row in rows] == [(0, 0), (1, 0), (2, 0), (1, 1)]
    assert all(row.matches for row in rows)
    assert rows[0].to_dict()["weight"] == [0, 0]


def test_weights_must_be_partitions():
    with pytest.raises(NoHighestWeightVector):
        central_character(1, 2, (0, 1), q=Q)
    with pytest.raises(ParameterMismatch):
        central_character(1, 2, (1,), q=Q)


def test_central_character_check():
    assert central_character_check(1, 2, (1, 1), q=Q)


def test_rank_one_x_is_the_squared_group_like():
    x = xy_operator("x", 1, 1, tensor_module(1, "+", Q))
    assert x.matrix == sympy.Matrix([[4]])
    with pytest.raises(ParameterMismatch):
        xy_operator("w", 1, 1, tensor_module(1, "+", Q))
