"""
Relations: both sides of every checked relation, grouped into suites.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from diagrams import (DOWN, UP, Gen, Morphism, ObjectWord, Step, crossing, crossing_steps, curl, dotted_loop, parse,
                      rotate_180)
from error_handler import HeisError, UnknownSuite
from rewrite import NormalForm, relation_residual
from scalars import ONE, Scalar, Z, zt
from symfunc import CCW, CW, MINUS, PLAIN, PLUS

logger = logging.getLogger("heiscat.relations")

Pair = Tuple[Morphism, Morphism]

SUITES = ("core", "curls", "bubbles", "braid")

_CROSSING_KIND = {(UP, UP): "up", (UP, DOWN): "right", (DOWN, UP): "left", (DOWN, DOWN): "down"}


# --- building blocks ---

def program(word: str, ops: Sequence[Tuple], coeff=ONE) -> Morphism:
    """
    Morphism from a bottom-to-top list of strand operations on `word`:
    ("dot", p, a), ("x", p), ("xneg", p), ("cup", p, "UD"|"DU"), ("cap", p) and
    ("bub", region, orientation, sign, label). Crossings on any pair of letters
    expand into primitive slices.
    """
    current = ObjectWord(word)
    steps: List[Step] = []
    for op in ops:
        kind, p = op[0], op[1]
        if kind == "dot":
            steps.append((Gen.DOT_UP if current[p] == UP else Gen.DOT_DOWN, p, op[2]))
        elif kind in ("x", "xneg"):
            steps.extend(crossing_steps(_CROSSING_KIND[(current[p], current[p + 1])], p, kind == "x"))
            current = current[:p] + ObjectWord((current[p + 1], current[p])) + current[p + 2:]
        elif kind == "cup":
            letters = ObjectWord(op[2])
            steps.append((Gen.CUP_RIGHT if letters == ObjectWord("DU") else Gen.CUP_LEFT, p))
            current = current[:p] + letters + current[p:]
        elif kind == "cap":
            steps.append((Gen.CAP_RIGHT if current[p] == UP else Gen.CAP_LEFT, p))
            current = current[:p] + current[p + 2:]
        else:
            steps.append((Gen.BUBBLE, p, op[4], op[2], op[3]))
    return Morphism.from_steps(word, steps, coeff)


def _total(word: str, parts: Sequence[Morphism]) -> Morphism:
    result = Morphism.zero(word, word)
    for part in parts:
        result = result + part
    return result


def _delta(a: int, b: int) -> int:
    return 1 if a == b else 0


def _scalar_id(word: str, c: Scalar) -> Morphism:
    return Morphism.identity(word).scale(c)


# --- core: affine Hecke relations, adjunctions and pitchforks ---

def _dot_slide(k: int, a: int) -> Pair:
    lhs = program("UU", [("dot", 0, a), ("x", 0)])
    terms = [program("UU", [("x", 0), ("dot", 1, a)])]
    if a > 0:
        terms += [program("UU", [("dot", 0, i), ("dot", 1, a - i)], Z) for i in range(1, a + 1)]
    elif a < 0:
        m = -a
        terms += [program("UU", [("dot", 0, j - m + 1), ("dot", 1, -1 - j)], -Z) for j in range(m)]
    return lhs, _total("UU", terms)


def _dot_composition(k: int, a: int) -> Pair:
    return program("U", [("dot", 0, a), ("dot", 0, -a)]), Morphism.identity("U")


def _text(lhs: str, rhs: str) -> Callable[[int, int], Pair]:
    return lambda k, a: (parse(lhs), parse(rhs))


def _cup_slide(letters: str, strand: str = UP, positive: bool = True) -> Callable[[int, int], Pair]:
    """A strand crossing one leg of a cup equals it crossing the other leg."""
    x = "x" if positive else "xneg"

    def build(k: int, a: int) -> Pair:
        return (program(strand, [("cup", 1, letters), (x, 0)]),
                program(strand, [("cup", 0, letters), (x, 1)]))
    return build


def _cap_slide(letters: str, strand: str = UP, positive: bool = True) -> Callable[[int, int], Pair]:
    x = "x" if positive else "xneg"
    word = letters[0] + strand + letters[1]

    def build(k: int, a: int) -> Pair:
        return program(word, [(x, 0), ("cap", 1)]), program(word, [(x, 1), ("cap", 0)])
    return build


def _cup_dot(letters: str) -> Callable[[int, int], Pair]:
    def build(k: int, a: int) -> Pair:
        return program("", [("cup", 0, letters), ("dot", 0, a)]), program("", [("cup", 0, letters), ("dot", 1, a)])
    return build


def _cap_dot(letters: str) -> Callable[[int, int], Pair]:
    return lambda k, a: (program(letters, [("dot", 0, a), ("cap", 0)]), program(letters, [("dot", 1, a), ("cap", 0)]))


def _pivotal_down_crossing(positive: bool) -> Callable[[int, int], Pair]:
    """The downward crossing built from rightward cups and caps against the leftward build."""
    x = Gen.CROSS_POS if positive else Gen.CROSS_NEG
    steps = [(Gen.CUP_LEFT, 2), (Gen.CUP_LEFT, 3), (x, 2), (Gen.CAP_LEFT, 1), (Gen.CAP_LEFT, 0)]
    return lambda k, a: (crossing("down", positive), Morphism.from_steps("DD", steps))


def _pivotal_left_crossing(positive: bool) -> Callable[[int, int], Pair]:
    return lambda k, a: (rotate_180(crossing("right", positive)), crossing("left", positive))


# --- curls and bubbles ---

def _curl_value(side: str) -> Callable[[int, int], Pair]:
    def build(k: int, a: int) -> Pair:
        if side == "left":
            return curl("left", 0, True), _scalar_id("U", zt(0, 1) * _delta(k, 0))
        return curl("right", 0, False), _scalar_id("U", zt(0, -1) * _delta(k, 0))
    return build


def _curl_expansion(side: str, positive: bool) -> Callable[[int, int], Pair]:
    """A curl with a dots on its loop as dotted strands beside (+)/(-) bubbles."""
    def build(k: int, a: int) -> Pair:
        def term(b: int, sign: str, coeff: Scalar) -> Morphism:
            if side == "left":
                return program("U", [("dot", 0, b), ("bub", 0, CCW, sign, a - b)], coeff)
            return program("U", [("dot", 0, b), ("bub", 1, CW, sign, a - b)], coeff)

        if side == "left":
            first = 0 if positive else 1
            parts = [term(b, PLUS, Z) for b in range(first, a + k + 1)]
            parts += [term(b, MINUS, -Z) for b in range(a, first)]
        else:
            last = 0 if positive else -1
            parts = [term(b, MINUS, Z) for b in range(a, last + 1)]
            parts += [term(b, PLUS, -Z) for b in range(last + 1, a - k + 1)]
        return curl(side, a, positive), _total("U", parts)
    return build


def _multiple(word: str, ops: Sequence[Tuple], target: str, c: Scalar) -> Morphism:
    if c.is_zero():
        return Morphism.zero(word, target)
    return program(word, ops, c)


def _dots(p: int, a: int) -> List[Tuple]:
    return [("dot", p, a)] if a else []


def _sideways_cup_curl(letters: str, positive: bool) -> Callable[[int, int], Pair]:
    """A cup whose legs cross above it, with a dots on the ↑ leg below the crossing."""
    x = "x" if positive else "xneg"
    flipped = letters[::-1]

    def build(k: int, a: int) -> Pair:
        if letters == "UD":
            lhs = program("", [("cup", 0, letters)] + _dots(0, a) + [(x, 0)])
            c = zt(0, 1) * _delta(a, 0) if positive else zt(0, -1) * _delta(k, 0)
        else:
            lhs = program("", [("cup", 0, letters)] + _dots(1, a) + [(x, 0)])
            c = zt(0, 1) * _delta(k, 0) * _delta(a, 0) if positive else zt(0, -1)
        return lhs, _multiple("", [("cup", 0, flipped)], flipped, c)
    return build


def _sideways_cap_curl(letters: str, positive: bool) -> Callable[[int, int], Pair]:
    """A cap closing two crossed legs, with a dots on the ↑ leg above the crossing."""
    x = "x" if positive else "xneg"

    def build(k: int, a: int) -> Pair:
        if letters == "UD":
            lhs = program(letters, [(x, 0)] + _dots(1, a) + [("cap", 0)])
            c = zt(0, 1) * _delta(k, 0) * _delta(a, 0) if positive else zt(0, -1)
        else:
            lhs = program(letters, [(x, 0)] + _dots(0, a) + [("cap", 0)])
            c = zt(0, 1) if positive else zt(0, -1) * _delta(k, 0) * _delta(a, 0)
        return lhs, _multiple(letters, [("cap", 0)], "", c)
    return build


def _loop_closure(orientation: str) -> Callable[[int, int], Pair]:
    return lambda k, a: (dotted_loop(orientation, a), program("", [("bub", 0, orientation, PLAIN, a)]))


def _window(orientation: str) -> Callable[[int, int], Pair]:
    def build(k: int, n: int) -> Pair:
        if orientation == CW:
            value = zt(-1, 1) * _delta(n, 0) - zt(-1, -1) * _delta(n, k)
        else:
            value = zt(-1, 1) * _delta(n, -k) - zt(-1, -1) * _delta(n, 0)
        return dotted_loop(orientation, n), _scalar_id("", value)
    return build


def _grassmannian(sign: str) -> Callable[[int, int], Pair]:
    def build(k: int, n: int) -> Pair:
        parts = []
        for r in range(n + 1):
            if sign == PLUS:
                ops = [("bub", 0, CCW, PLUS, r - k), ("bub", 0, CW, PLUS, n - r + k)]
            else:
                ops = [("bub", 0, CCW, MINUS, -r), ("bub", 0, CW, MINUS, r - n)]
            parts.append(program("", ops))
        return _total("", parts), _scalar_id("", zt(-2, 0, -1) * _delta(n, 0))
    return build


def _bubble_slide(orientation: str, sign: str) -> Callable[[int, int], Pair]:
    """
    A (+) or (-) bubble moved across an upward strand. Clockwise bubbles are
    written left of the strand, counterclockwise ones right of it.
    """
    def build(k: int, a: int) -> Pair:
        start, end = (0, 1) if orientation == CW else (1, 0)
        lhs = program("U", [("bub", start, orientation, sign, a)])
        parts = [program("U", [("bub", end, orientation, sign, a)])]
        if sign == PLUS:
            reach = a - k if orientation == CW else a + k
            shifts = [(s, s, a - s) for s in range(1, reach + 1)]
        else:
            shifts = [(s, -s, a + s) for s in range(1, -a + 1)]
        for s, power, label in shifts:
            parts.append(program("U", [("dot", 0, power), ("bub", end, orientation, sign, label)], zt(2, 0, -s)))
        return lhs, _total("U", parts)
    return build


# --- braids ---

def _alternating_braid(k: int, a: int) -> Pair:
    if k >= 0:
        lhs = program("UDU", [("x", 0), ("xneg", 1), ("x", 0)]) - program("UDU", [("x", 1), ("xneg", 0), ("x", 1)])
    else:
        lhs = program("UDU", [("xneg", 0), ("x", 1), ("xneg", 0)]) - program("UDU", [("xneg", 1), ("x", 0), ("xneg", 1)])
    z3 = Z ** 3
    parts = []
    for total in range(1, abs(k) + 1):
        for c in range(1, total + 1):
            for top in range(total - c + 1):
                bottom = total - c - top
                if k >= 0:
                    ops = [("dot", 0, bottom), ("cap", 0), ("dot", 0, c), ("cup", 0, "UD"),
                           ("dot", 0, top), ("bub", 0, CCW, PLUS, -total)]
                else:
                    ops = [("dot", 2, bottom), ("cap", 1), ("dot", 0, c), ("cup", 1, "DU"),
                           ("dot", 2, top), ("bub", 3, CW, PLUS, -total)]
                parts.append(program("UDU", ops, z3))
    return lhs, _total("UDU", parts)


def _sideways_inverse(k: int, a: int) -> Pair:
    lhs = program("DU", [("x", 0), ("x", 0)])
    parts = [Morphism.identity("DU"), program("DU", [("cap", 0), ("cup", 0, "DU")], zt(1, 1))]
    for total in range(2, -k + 1):
        for top in range(1, total):
            parts.append(program("DU", [("dot", 1, total - top), ("cap", 0), ("cup", 0, "DU"),
                                        ("dot", 1, top), ("bub", 0, CW, PLUS, -total)], Z * Z))
    return lhs, _total("DU", parts)


def _sideways_inverse_up(k: int, a: int) -> Pair:
    lhs = program("UD", [("xneg", 0), ("xneg", 0)])
    parts = [Morphism.identity("UD"), program("UD", [("cap", 0), ("cup", 0, "UD")], zt(1, -1, -1))]
    for total in range(2, k + 1):
        for top in range(1, total):
            parts.append(program("UD", [("dot", 0, total - top), ("cap", 0), ("cup", 0, "UD"),
                                        ("dot", 0, top), ("bub", 2, CCW, PLUS, -total)], Z * Z))
    return lhs, _total("UD", parts)


def _sideways_identity(word: str, first: str, second: str) -> Callable[[int, int], Pair]:
    return lambda k, a: (program(word, [(first, 0), (second, 0)]), Morphism.identity(word))


# --- the table ---

@dataclass(frozen=True)
class Relation:
    """One relation family: build(k, label) returns both sides."""
    name: str
    suite: str
    build: Callable[[int, int], Pair]
    labels: Tuple[int, ...] = (0,)
    when: Callable[[int, int], bool] = field(default=lambda k, a: True)

    def instances(self, k: int) -> Iterator[Tuple[str, Morphism, Morphism]]:
        for a in self.labels:
            if self.when(k, a):
                lhs, rhs = self.build(k, a)
                name = self.name if self.labels == (0,) else f"{self.name}[{a}]"
                yield name, lhs, rhs


_LABELS = tuple(range(-3, 4))

_SIDES = {"DU": "right", "UD": "left"}


def _slide_relations() -> List[Relation]:
    out = []
    for kind, builder in (("cup", _cup_slide), ("cap", _cap_slide)):
        for letters in ("DU", "UD"):
            for strand in (UP, DOWN):
                for positive in (True, False):
                    name = f"{kind}-slide-{_SIDES[letters]}"
                    name += "" if strand == UP else "-down"
                    name += "" if positive else "-negative"
                    out.append(Relation(name, "core", builder(letters, strand, positive)))
    return out


def _k_nonpositive_dots(k: int, a: int) -> bool:
    return k <= 0 and 0 <= a < max(1, -k)


def _k_nonnegative_dots(k: int, a: int) -> bool:
    return k >= 0 and 0 <= a < max(1, k)


RELATIONS: List[Relation] = [
    Relation("quadratic", "core", _text("x+ . x+", "[z] x+ + 1u * 1u")),
    Relation("skein", "core", _text("x+ - x-", "[z] 1u * 1u")),
    Relation("crossing-inverse", "core", _text("x- . x+", "1u * 1u")),
    Relation("dot-slide", "core", _dot_slide, _LABELS),
    Relation("dot-conjugation", "core", _text("x+ . (1u * dotu(1)) . x+", "dotu(1) * 1u")),
    Relation("dot-composition", "core", _dot_composition, _LABELS),
    Relation("zigzag-right-up", "core", _text("(capr * 1u) . (1u * cupr)", "1u")),
    Relation("zigzag-right-down", "core", _text("(1d * capr) . (cupr * 1d)", "1d")),
    Relation("zigzag-left-up", "core", _text("(1u * capl) . (cupl * 1u)", "1u")),
    Relation("zigzag-left-down", "core", _text("(capl * 1d) . (1d * cupl)", "1d")),
    Relation("down-dot-right", "core", _text("dotd(1)", "(1d * capr) . (1d * dotu(1) * 1d) . (cupr * 1d)")),
    Relation("down-dot-left", "core", _text("dotd(1)", "(capl * 1d) . (1d * dotu(1) * 1d) . (1d * cupl)")),
    *_slide_relations(),
    Relation("cup-dot-right", "core", _cup_dot("DU"), _LABELS),
    Relation("cup-dot-left", "core", _cup_dot("UD"), _LABELS),
    Relation("cap-dot-right", "core", _cap_dot("UD"), _LABELS),
    Relation("cap-dot-left", "core", _cap_dot("DU"), _LABELS),
    Relation("pivotal-down-crossing", "core", _pivotal_down_crossing(True)),
    Relation("pivotal-down-crossing-negative", "core", _pivotal_down_crossing(False)),
    Relation("pivotal-left-crossing", "core", _pivotal_left_crossing(True)),
    Relation("pivotal-left-crossing-negative", "core", _pivotal_left_crossing(False)),
    Relation("left-curl", "curls", _curl_value("left"), when=lambda k, a: k <= 0),
    Relation("right-curl", "curls", _curl_value("right"), when=lambda k, a: k >= 0),
    Relation("left-curl-expansion", "curls", _curl_expansion("left", True), _LABELS),
    Relation("left-curl-expansion-negative", "curls", _curl_expansion("left", False), _LABELS),
    Relation("right-curl-expansion", "curls", _curl_expansion("right", True), _LABELS),
    Relation("right-curl-expansion-negative", "curls", _curl_expansion("right", False), _LABELS),
    Relation("sideways-curl-left-cup", "curls", _sideways_cup_curl("UD", True), (0, 1, 2, 3),
             when=lambda k, a: 0 <= a <= k),
    Relation("sideways-curl-left-cup-negative", "curls", _sideways_cup_curl("UD", False), when=lambda k, a: k >= 0),
    Relation("sideways-curl-right-cup", "curls", _sideways_cup_curl("DU", True), (0, 1, 2, 3), when=_k_nonpositive_dots),
    Relation("sideways-curl-right-cup-negative", "curls", _sideways_cup_curl("DU", False), when=lambda k, a: k <= 0),
    Relation("sideways-curl-right-cap", "curls", _sideways_cap_curl("UD", True), (0, 1, 2, 3), when=_k_nonpositive_dots),
    Relation("sideways-curl-right-cap-negative", "curls", _sideways_cap_curl("UD", False), when=lambda k, a: k <= 0),
    Relation("sideways-curl-left-cap", "curls", _sideways_cap_curl("DU", True), when=lambda k, a: k >= 0),
    Relation("sideways-curl-left-cap-negative", "curls", _sideways_cap_curl("DU", False), (0, 1, 2, 3),
             when=_k_nonnegative_dots),
    Relation("loop-closure-cw", "bubbles", _loop_closure(CW), _LABELS),
    Relation("loop-closure-ccw", "bubbles", _loop_closure(CCW), _LABELS),
    Relation("cw-window", "bubbles", _window(CW), (0, 1, 2), when=lambda k, n: 0 <= n <= k),
    Relation("ccw-window", "bubbles", _window(CCW), (0, 1, 2), when=lambda k, n: 0 <= n <= -k),
    Relation("grassmannian-plus", "bubbles", _grassmannian(PLUS), (0, 1, 2, 3)),
    Relation("grassmannian-minus", "bubbles", _grassmannian(MINUS), (0, 1, 2, 3)),
    Relation("slide-cw-plus", "bubbles", _bubble_slide(CW, PLUS), _LABELS),
    Relation("slide-ccw-plus", "bubbles", _bubble_slide(CCW, PLUS), _LABELS),
    Relation("slide-cw-minus", "bubbles", _bubble_slide(CW, MINUS), _LABELS),
    Relation("slide-ccw-minus", "bubbles", _bubble_slide(CCW, MINUS), _LABELS),
    Relation("braid", "braid", _text("(x+ * 1u) . (1u * x+) . (x+ * 1u)", "(1u * x+) . (x+ * 1u) . (1u * x+)")),
    Relation("alternating-braid", "braid", _alternating_braid),
    Relation("sideways-inverse", "braid", _sideways_inverse),
    Relation("sideways-inverse-up-down", "braid", _sideways_inverse_up),
    Relation("sideways-inverse-up-down-positive", "braid", _sideways_identity("UD", "x", "x"), when=lambda k, a: k < 0),
    Relation("sideways-inverse-negative", "braid", _sideways_identity("DU", "xneg", "xneg"), when=lambda k, a: k > 0),
    Relation("sideways-inverse-mixed", "braid", _sideways_identity("DU", "xneg", "x"), when=lambda k, a: k > 0),
]


def relations_in(suite: str) -> List[Relation]:
    if suite == "all":
        return list(RELATIONS)
    if suite not in SUITES:
        raise UnknownSuite(f"unknown relation suite {suite!r}; choose from {', '.join(SUITES + ('all',))}")
    return [r for r in RELATIONS if r.suite == suite]


# --- checking ---

@dataclass
class RelationResult:
    name: str
    suite: str
    k: int
    passed: bool
    residual: Optional[NormalForm] = None
    error: str = ""

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "suite": self.suite,
            "k": self.k,
            "passed": self.passed,
            "residual": self.residual.render() if self.residual is not None and not self.passed else "",
            "error": self.error,
        }


def check_relation(relation: Relation, k: int, budget: Optional[int] = None) -> List[RelationResult]:
    results = []
    for name, lhs, rhs in relation.instances(k):
        try:
            residual = relation_residual(lhs, rhs, k, budget)
            results.append(RelationResult(name, relation.suite, k, residual.is_zero(), residual))
        except HeisError as e:
            logger.warning("relation %s at k=%d failed to normalize: %s", name, k, e)
            results.append(RelationResult(name, relation.suite, k, False, error=str(e)))
        if not results[-1].passed:
            logger.info("relation %s at k=%d has residual %s", name, k,
                        results[-1].residual.render() if results[-1].residual is not None else results[-1].error)
    return results


def check_suite(suite: str, k: int, budget: Optional[int] = None) -> List[RelationResult]:
    results: List[RelationResult] = []
    for relation in relations_in(suite):
        results.extend(check_relation(relation, k, budget))
    return results
