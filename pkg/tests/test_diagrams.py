import pytest

from diagrams import (
    DOWN,
    EMPTY,
    UP,
    Diagram,
    Gen,
    Morphism,
    ObjectWord,
    bubble,
    compose,
    crossing,
    curl,
    from_json,
    generator,
    omega,
    parse,
    render,
    rotate_180,
    tensor,
    to_json,
)
from error_handler import DiagramSyntaxError, ParameterMismatch, TypeMismatch
from scalars import Scalar, zt
from symfunc import CCW, CW, PLUS

Z = zt(1, 0)


# --- object words ---

def test_object_word_accepts_arrows_and_letters():
    assert ObjectWord("↑↓") == ObjectWord("UD") == ObjectWord([UP, DOWN])
    assert ObjectWord("UD").code == "UD"
    assert str(EMPTY) == "𝟙"


def test_object_word_rejects_other_letters():
    with pytest.raises(ParameterMismatch):
        ObjectWord("UX")


def test_dual_reverses_and_flips():
    assert ObjectWord("UUD").dual() == ObjectWord("UDD")
    assert ObjectWord("UD").flipped() == ObjectWord("DU")


# --- typing ---

def test_slices_are_type_checked():
    with pytest.raises(TypeMismatch):
        Morphism.from_steps("UD", [(Gen.CROSS_POS, 0)])
    with pytest.raises(TypeMismatch):
        Morphism.from_steps("U", [(Gen.DOT_UP, 1, 1)])


def test_compose_checks_boundaries():
    with pytest.raises(TypeMismatch) as info:
        compose(generator(Gen.DOT_UP, 1), crossing("up"))
    assert info.value.expected == ObjectWord("U")


def test_adding_different_boundaries_fails():
    with pytest.raises(TypeMismatch):
        Morphism.identity("U") + Morphism.identity("D")


def test_cup_changes_the_word():
    cup = generator(Gen.CUP_RIGHT)
    assert (cup.source, cup.target) == (EMPTY, ObjectWord("DU"))
    d = Diagram.build("U", [(Gen.CUP_LEFT, 0), (Gen.CAP_LEFT, 1)])
    assert d.target == ObjectWord("U")


def test_composite_crossings_have_expected_boundaries():
    assert crossing("right").target == ObjectWord("DU")
    assert crossing("left").target == ObjectWord("UD")
    assert crossing("down").target == ObjectWord("DD")
    assert curl("left").source == curl("right").target == ObjectWord("U")


# --- linear structure ---

def test_linear_combinations_cancel():
    x = crossing("up")
    assert (x - x).is_zero()
    assert len(x + x) == 1
    assert (x + x) == x.scale(2)


def test_tensor_places_slices_side_by_side():
    f = tensor(generator(Gen.DOT_UP, 2), crossing("up"))
    assert f.source == ObjectWord("UUU")
    (d, c), = f.items()
    assert c == Scalar.one()
    assert [s.position for s in d.slices] == [0, 1]


# --- text format ---

@pytest.mark.parametrize(
    "text",
    [
        "x+ . x+",
        "[z] x+ + 1u * 1u",
        "(capr * 1u) . (1u * cupr)",
        "bub(ccw,plus,1) * dotu(-2)",
        "dotd(3) - [t^2] 1d",
    ],
)
def test_render_reparses(text):
    f = parse(text)
    assert parse(render(f)) == f


def test_parse_coefficients():
    f = parse("[z] x+ + 1u * 1u")
    expected = crossing("up").scale(Z) + Morphism.identity("UU")
    assert f == expected


def test_parse_identity_of_unit_object():
    assert parse("id") == Morphism.identity(EMPTY)


def test_syntax_error_has_position():
    with pytest.raises(DiagramSyntaxError) as info:
        parse("x+ . ")
    assert info.value.position >= 0
    assert isinstance(info.value, SyntaxError)


def test_parse_rejects_ill_typed_composites():
    with pytest.raises(TypeMismatch):
        parse("dotu(1) . dotd(1)")


def test_json_export():
    f = parse("[z] x+ + bub(cw,plus,2) * 1u * 1u")
    assert from_json(to_json(f)) == f


# --- symmetries ---

def test_rotation_is_an_involution_without_crossings():
    f = parse("(1d * capl * dotu(2)) . (1d * cupr * 1u) . (dotd(1) * bub(ccw,minus,-1) * 1u)")
    assert rotate_180(rotate_180(f)) == f


def test_rotation_turns_up_dots_into_down_dots():
    assert rotate_180(generator(Gen.DOT_UP, 3)) == generator(Gen.DOT_DOWN, 3)
    assert rotate_180(generator(Gen.CUP_RIGHT)) == generator(Gen.CAP_LEFT)


def test_omega_signs_and_orientations():
    image = omega(bubble(CCW, PLUS, 1))
    assert image == bubble(CW, PLUS, 1).scale(-1)
    assert image.twisted


def test_omega_is_an_involution():
    f = parse("bub(ccw,plus,1) * dotu(2)")
    assert omega(omega(f)) == f
    assert not omega(omega(f)).twisted
