import pytest

from error_handler import WindowMismatch
from scalars import Scalar, zt
from symfunc import (
    CCW,
    CW,
    MINUS,
    PLUS,
    BubbleSeries,
    QZScalar,
    SymElt,
    SymSym,
    SymSym2,
    beta_dict,
    beta_image_rank,
    bubble_series,
    bubble_symsym,
    comult_apply,
    comult_center,
    comult_generator,
    dorking_residual,
    generator_symsym,
    h_det_e,
    h_from_e,
    htilde,
    htilde_recurrence_rhs,
    series_mul_truncated,
    symid_residual,
)

E1 = SymElt.e(1)
E2 = SymElt.e(2)
E3 = SymElt.e(3)


def test_h_from_e_small():
    assert h_from_e(0) == SymElt.one()
    assert h_from_e(1) == E1
    assert h_from_e(2) == E1 * E1 - E2


def test_h_det_e_small():
    assert h_det_e(1) == E1
    assert h_det_e(2) == E1 * E1 - E2
    assert h_det_e(3) == E1 ** 3 - E1 * E2 * 2 + E3


@pytest.mark.parametrize("n", range(9))
def test_h_from_e_matches_determinant(n):
    assert h_from_e(n) == h_det_e(n)


@pytest.mark.parametrize("n", range(9))
def test_symid(n):
    assert symid_residual(n).is_zero()


def test_htilde_examples():
    assert htilde(0, 3) == {(0, 0, 0): QZScalar.monomial(1, -1)}
    assert htilde(1, 1) == {(1,): QZScalar.one()}
    assert htilde(2, 2) == {
        (2, 0): QZScalar.one(),
        (0, 2): QZScalar.one(),
        (1, 1): QZScalar.monomial(-1, 1),
    }
    assert htilde(2, 0) == {}


@pytest.mark.parametrize("m", range(6))
@pytest.mark.parametrize("n", range(1, 5))
def test_htilde_recurrence(m, n):
    assert htilde(m, n) == htilde_recurrence_rhs(m, n)


@pytest.mark.parametrize("m", range(1, 6))
@pytest.mark.parametrize("n", range(1, 5))
def test_dorking_identity(m, n):
    assert dorking_residual(m, n) == {}


def test_beta_dict_examples():
    k = 2
    n = 3
    assert beta_dict(k, "h⊗1", n) == (zt(1, 1), CW, PLUS, n + k)
    assert beta_dict(k, "e⊗1", n) == (zt(1, -1), CCW, PLUS, n - k)
    assert beta_dict(k, "1⊗e", n) == (zt(1, 1, -1), CCW, MINUS, -n)


@pytest.mark.parametrize("k", range(-2, 3))
@pytest.mark.parametrize("generator", ["h⊗1", "1⊗h", "e⊗1", "1⊗e"])
@pytest.mark.parametrize("n", range(1, 5))
def test_beta_dict_inverts_bubble_values(k, generator, n):
    prefactor, orientation, sign, label = beta_dict(k, generator, n)
    assert bubble_symsym(orientation, sign, label, k) * prefactor == generator_symsym(generator, n)


@pytest.mark.parametrize("k", range(-2, 3))
def test_out_of_range_bubble_values(k):
    assert bubble_symsym(CCW, PLUS, -k, k) == SymSym.scalar(zt(-1, 1))
    assert bubble_symsym(CCW, PLUS, -k - 1, k).is_zero()
    assert bubble_symsym(CW, PLUS, k, k) == SymSym.scalar(zt(-1, -1, -1))
    assert bubble_symsym(CW, MINUS, 0, k) == SymSym.scalar(zt(-1, 1))
    assert bubble_symsym(CCW, MINUS, 0, k) == SymSym.scalar(zt(-1, -1, -1))
    assert bubble_symsym(CCW, MINUS, 1, k).is_zero()


@pytest.mark.parametrize("k", range(-2, 3))
@pytest.mark.parametrize("sign", [PLUS, MINUS])
@pytest.mark.parametrize("order", [0, 3, 8])
def test_infinite_grassmannian(k, sign, order):
    ccw = bubble_series(k, CCW, sign, order)
    cw = bubble_series(k, CW, sign, order)
    assert series_mul_truncated(ccw, cw, order).is_one()


def test_series_leading_terms():
    k = 2
    plus = bubble_series(k, CCW, PLUS, 4)
    assert plus.leading == -k
    assert plus.coefficient(-k) == SymSym.one()
    minus = bubble_series(k, CW, MINUS, 4)
    assert minus.leading == 0
    assert minus.coefficient(-1) == -SymSym.e(1, 1)


def test_series_times_one():
    series = bubble_series(1, CCW, PLUS, 5)
    product = series_mul_truncated(series, BubbleSeries.one(PLUS, 5), 5)
    assert product.coeffs == series.coeffs


def test_window_mismatch():
    plus = bubble_series(0, CCW, PLUS, 3)
    minus = bubble_series(0, CCW, MINUS, 3)
    with pytest.raises(WindowMismatch):
        series_mul_truncated(plus, minus, 3)
    with pytest.raises(WindowMismatch):
        series_mul_truncated(plus, bubble_series(0, CW, PLUS, 3), 5)


def test_comult_leading_coefficient():
    series = comult_center(0, 0, CCW, PLUS, 0)
    assert series.coefficient(0) == SymSym2.one()


def test_comult_first_order_minus():
    series = comult_center(0, 0, CCW, MINUS, 2)
    expected = SymSym2({((), (1,), (), ()): Scalar.one(), ((), (), (), (1,)): Scalar.one()})
    assert series.coefficient(-1) == expected


@pytest.mark.parametrize("l,m", [(0, 0), (-1, 1), (1, -1), (-1, 0)])
@pytest.mark.parametrize("sign", [PLUS, MINUS])
def test_comult_is_multiplicative_on_series(l, m, sign):
    order = 6
    product = series_mul_truncated(
        comult_center(l, m, CW, sign, order), comult_center(l, m, CCW, sign, order), order
    )
    assert product.is_one()


@pytest.mark.parametrize("l,m", [(0, 0), (-1, 1), (1, -1), (-1, 0)])
@pytest.mark.parametrize("n", range(1, 5))
def test_comult_of_h_agrees_with_algebra_map(l, m, n):
    for generator in ("h⊗1", "1⊗h"):
        direct = comult_generator(l, m, generator, n)
        via_e = comult_apply(generator_symsym(generator, n), l, m)
        assert direct == via_e


@pytest.mark.parametrize("family", [CCW, CW])
def test_beta_injective_to_degree_four(family):
    count, rank = beta_image_rank(4, family)
    assert count == rank
