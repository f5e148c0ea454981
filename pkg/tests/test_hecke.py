from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from error_handler import DiagramSyntaxError, ParameterMismatch
from hecke import (
    CyclotomicPoly,
    HeckeElement,
    ak_basis,
    cyclotomic_from_json,
    cyclotomic_reduce,
    embed,
    hecke_mul,
    hecke_parse,
    hecke_render,
    mackey_decompose,
    mackey_matrix_rank,
    reduced_word,
    trace,
)
from scalars import Scalar, zt

Z = zt(1, 0)
POINT = {"z": Fraction(3, 7), "t": Fraction(5, 3)}
F_LINEAR = CyclotomicPoly([1, "t^2"])
F_QUADRATIC = CyclotomicPoly([1, "z", "t^2"])


def x(i, n, power=1):
    return HeckeElement.x(i, n, power)


def tau(i, n):
    return HeckeElement.tau(i, n)


def one(n):
    return HeckeElement.one(n)


# --- affine Hecke relations ---

def test_quadratic_relation():
    assert tau(1, 2) * tau(1, 2) == tau(1, 2).scale(Z) + one(2)


def test_conjugating_x1_gives_x2():
    assert tau(1, 2) * x(1, 2) * tau(1, 2) == x(2, 2)


def test_dot_slide():
    assert tau(1, 2) * x(1, 2) == x(2, 2) * tau(1, 2) - x(2, 2).scale(Z)


def test_braid_relation():
    assert tau(1, 3) * tau(2, 3) * tau(1, 3) == tau(2, 3) * tau(1, 3) * tau(2, 3)


def test_far_commutation():
    assert tau(1, 4) * tau(3, 4) == tau(3, 4) * tau(1, 4)
    assert tau(2, 3) * x(1, 3) == x(1, 3) * tau(2, 3)


def test_tau_inverse():
    assert tau(2, 3) * HeckeElement.tau_inverse(2, 3) == one(3)


def test_inverse_dots():
    assert x(2, 2, -1) * x(2, 2) == one(2)


_monomials = st.builds(
    lambda r, word: HeckeElement.monomial(r) * HeckeElement.tau_word(word, 3),
    st.tuples(*[st.integers(-2, 2)] * 3),
    st.lists(st.integers(1, 2), max_size=3),
)


@settings(max_examples=40, deadline=None)
@given(_monomials, _monomials, _monomials)
def test_affine_multiplication_is_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


def test_reduced_word_is_lexicographically_smallest():
    # s_1 s_2 s_1 = s_2 s_1 s_2
    longest = (2, 1, 0)
    assert reduced_word(longest) == [1, 2, 1]
    assert reduced_word((0, 1, 2)) == []


# --- cyclotomic quotients ---

def test_cyclotomic_poly_validation():
    with pytest.raises(ParameterMismatch):
        CyclotomicPoly([2, 1])
    with pytest.raises(ParameterMismatch):
        CyclotomicPoly([1, "1 + z"])
    assert cyclotomic_from_json({"coeffs": [1, 0, "t^2"]}).l == 2


def test_cyclotomic_relation_holds():
    for f in (F_LINEAR, F_QUADRATIC):
        assert cyclotomic_reduce(f.evaluate_x(1, 2), f).is_zero()


@pytest.mark.parametrize("n,l", [(1, 1), (1, 3), (2, 2), (3, 1)])
def test_ak_basis_size(n, l):
    basis = ak_basis(n, l)
    factorial = 1
    for i in range(2, n + 1):
        factorial *= i
    assert len(basis) == len(set(basis)) == l ** n * factorial


def test_reduction_is_a_homomorphism():
    f = F_QUADRATIC
    a = x(2, 2, 3) * tau(1, 2) + x(1, 2, -1)
    b = tau(1, 2) * x(1, 2, 2)
    left = cyclotomic_reduce(a * b, f)
    right = hecke_mul(cyclotomic_reduce(a, f), cyclotomic_reduce(b, f), f)
    assert left == right


def test_embedding_is_injective_on_basis():
    basis = ak_basis(2, 2)
    images = {embed(HeckeElement(2, {key: Scalar.one()})) for key in basis}
    assert len(images) == len(basis)


# --- trace ---

def test_trace_of_x1_squared():
    f = cyclotomic_from_json({"coeffs": [1, 0, "t^2"]})
    result = trace(x(1, 1, 2), f)
    assert result == HeckeElement.scalar(0, zt(0, 2, -1))
    assert hecke_render(result) == "-t^2"


@pytest.mark.parametrize("n", [0, 1, 2])
def test_trace_of_top_dots(n):
    f = F_QUADRATIC
    assert trace(one(n + 1), f) == one(n)
    assert trace(x(n + 1, n + 1), f).is_zero()


@pytest.mark.parametrize("n", [1, 2])
def test_trace_kills_tau_n(n):
    assert trace(tau(n, n + 1), F_QUADRATIC).is_zero()


@pytest.mark.parametrize("f", [F_LINEAR, F_QUADRATIC])
@pytest.mark.parametrize("n", [0, 1, 2])
def test_trace_of_cyclotomic_polynomial_vanishes(f, n):
    assert trace(f.evaluate_x(n + 1, n + 1), f).is_zero()


def test_trace_is_a_bimodule_map():
    f = F_QUADRATIC
    u = x(1, 1) + one(1)
    v = x(1, 1, -1)
    a = tau(1, 2) * x(1, 2) + x(2, 2) * x(1, 2)
    inside = hecke_mul(hecke_mul(embed(u), cyclotomic_reduce(a, f), f), cyclotomic_reduce(embed(v), f), f)
    outside = hecke_mul(hecke_mul(u, trace(a, f), f), cyclotomic_reduce(v, f), f)
    assert trace(inside, f) == outside


# --- Mackey decomposition ---

def test_mackey_of_tau_and_dot():
    f = F_QUADRATIC
    result = mackey_decompose(tau(1, 2), f)
    assert result.middle == [(one(1), one(1))]
    assert all(w.is_zero() for w in result.tail)
    result = mackey_decompose(x(2, 2), f)
    assert result.middle == []
    assert result.tail[1] == one(1)


@pytest.mark.parametrize(
    "element",
    [
        x(2, 2) * tau(1, 2),
        tau(1, 2) * x(1, 2) * tau(1, 2) + x(1, 2, 3),
        x(3, 3) * tau(2, 3) * tau(1, 3),
    ],
)
def test_mackey_reassembles(element):
    f = F_QUADRATIC
    result = mackey_decompose(element, f)
    assert result.reassemble(f) == cyclotomic_reduce(element, f)


@pytest.mark.parametrize("n,f", [(0, F_LINEAR), (0, F_QUADRATIC), (1, F_LINEAR), (1, F_QUADRATIC), (2, F_LINEAR), (2, F_QUADRATIC)])
def test_mackey_map_is_invertible(n, f):
    rank, dim = mackey_matrix_rank(n, f, POINT)
    assert rank == dim


# --- text format ---

def test_parse_and_render():
    a = hecke_parse("[z] x1^2 s(1)", 2)
    assert a == x(1, 2, 2).scale(Z) * tau(1, 2)
    assert hecke_render(a) == "[z] x1^2 s(1)"
    assert hecke_parse("s(1 1)", 2) == tau(1, 2).scale(Z) + one(2)
    assert hecke_parse("x1 + [-1] x2", 2) == x(1, 2) - x(2, 2)
    assert hecke_parse("0", 3).is_zero()


def test_parse_errors():
    with pytest.raises(DiagramSyntaxError):
        hecke_parse("x3", 2)
    with pytest.raises(DiagramSyntaxError):
        hecke_parse("s(2)", 2)
    with pytest.raises(DiagramSyntaxError):
        hecke_parse("x1 *", 2)
