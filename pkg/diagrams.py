"""
Diagrams: object words, elementary slices, morphisms, symmetries and the text format.
"""

import json
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import pyparsing as pp

from error_handler import DiagramSyntaxError, ParameterMismatch, TypeMismatch
from scalars import ONE, Scalar, coerce_scalar, parse_scalar, render_scalar
from symfunc import CCW, CW, MINUS, PLAIN, PLUS

logger = logging.getLogger("heiscat.diagrams")

UP = "U"
DOWN = "D"

_ARROWS = {UP: "↑", DOWN: "↓"}


class ObjectWord(tuple):
    """Tensor word of ↑/↓ letters, stored left to right."""

    def __new__(cls, letters: Iterable[str] = ()):
        if isinstance(letters, str):
            letters = letters.replace("↑", UP).replace("↓", DOWN).replace(" ", "")
        letters = tuple(letters)
        for letter in letters:
            if letter not in (UP, DOWN):
                raise ParameterMismatch(f"object words use U and D only, got {letter!r}")
        return super().__new__(cls, letters)

    def __add__(self, other) -> "ObjectWord":
        return ObjectWord(tuple(self) + tuple(other))

    def __getitem__(self, item):
        value = super().__getitem__(item)
        return ObjectWord(value) if isinstance(item, slice) else value

    def flipped(self) -> "ObjectWord":
        return ObjectWord(DOWN if letter == UP else UP for letter in self)

    def dual(self) -> "ObjectWord":
        """Reversed and orientation-flipped word (the 180° rotation)."""
        return ObjectWord(reversed(self.flipped()))

    @property
    def code(self) -> str:
        return "".join(self)

    def __str__(self) -> str:
        return "".join(_ARROWS[letter] for letter in self) or "𝟙"

    def __repr__(self) -> str:
        return f"ObjectWord({self.code!r})"


EMPTY = ObjectWord()


class Gen(Enum):
    """Primitive generators; text tokens double as enum values."""
    DOT_UP = "dotu"
    DOT_DOWN = "dotd"
    CROSS_POS = "x+"
    CROSS_NEG = "x-"
    CUP_RIGHT = "cupr"
    CAP_RIGHT = "capr"
    CUP_LEFT = "cupl"
    CAP_LEFT = "capl"
    BUBBLE = "bub"


# (input letters, output letters) at the slice position
ARITY: Dict[Gen, Tuple[ObjectWord, ObjectWord]] = {
    Gen.DOT_UP: (ObjectWord("U"), ObjectWord("U")),
    Gen.DOT_DOWN: (ObjectWord("D"), ObjectWord("D")),
    Gen.CROSS_POS: (ObjectWord("UU"), ObjectWord("UU")),
    Gen.CROSS_NEG: (ObjectWord("UU"), ObjectWord("UU")),
    Gen.CUP_RIGHT: (EMPTY, ObjectWord("DU")),
    Gen.CAP_RIGHT: (ObjectWord("UD"), EMPTY),
    Gen.CUP_LEFT: (EMPTY, ObjectWord("UD")),
    Gen.CAP_LEFT: (ObjectWord("DU"), EMPTY),
    Gen.BUBBLE: (EMPTY, EMPTY),
}

BUBBLE_SIGNS = (PLAIN, PLUS, MINUS)
_SIGN_TOKENS = {PLAIN: "plain", PLUS: "plus", MINUS: "minus"}


@dataclass(frozen=True)
class Slice:
    """One generator at a strand offset, with the word below it as context."""
    kind: Gen
    position: int
    context: ObjectWord
    label: int = 0
    orientation: str = ""
    sign: str = ""

    def __post_init__(self):
        needed, _ = ARITY[self.kind]
        width = len(needed)
        if self.position < 0 or self.position + width > len(self.context):
            raise TypeMismatch(
                f"{self.kind.value} at {self.position} does not fit {self.context}",
                expected=needed, found=self.context,
            )
        found = self.context[self.position:self.position + width]
        if found != needed:
            raise TypeMismatch(
                f"{self.kind.value} at {self.position} needs {needed}, found {found}",
                expected=needed, found=found,
            )
        if self.kind == Gen.BUBBLE:
            if self.orientation not in (CW, CCW) or self.sign not in BUBBLE_SIGNS:
                raise ParameterMismatch(f"bad bubble {self.orientation}{self.sign}")

    @property
    def output(self) -> ObjectWord:
        needed, produced = ARITY[self.kind]
        c = self.context
        return c[:self.position] + produced + c[self.position + len(needed):]

    def shifted(self, offset: int, left: ObjectWord, right: ObjectWord) -> "Slice":
        return Slice(self.kind, self.position + offset, left + self.context + right,
                     self.label, self.orientation, self.sign)

    def to_dict(self) -> Dict:
        return {
            "kind": self.kind.value,
            "position": self.position,
            "label": self.label,
            "orientation": self.orientation,
            "sign": self.sign,
        }


# (kind, position[, label[, orientation, sign]])
Step = Tuple


def _make_slice(context: ObjectWord, step: Union[Step, Slice]) -> Slice:
    if isinstance(step, Slice):
        return Slice(step.kind, step.position, context, step.label, step.orientation, step.sign)
    kind, position, *rest = step
    label = rest[0] if rest else 0
    orientation = rest[1] if len(rest) > 1 else ""
    sign = rest[2] if len(rest) > 2 else ""
    return Slice(Gen(kind), position, context, label, orientation, sign)


@dataclass(frozen=True)
class Diagram:
    """Rigid stack of slices, listed bottom to top."""
    source: ObjectWord
    target: ObjectWord
    slices: Tuple[Slice, ...] = ()

    @classmethod
    def build(cls, source: Union[ObjectWord, str], steps: Iterable[Union[Step, Slice]] = ()) -> "Diagram":
        word = ObjectWord(source)
        start = word
        out = []
        for step in steps:
            s = _make_slice(word, step)
            out.append(s)
            word = s.output
        return cls(start, word, tuple(out))

    def steps(self) -> List[Step]:
        return [(s.kind, s.position, s.label, s.orientation, s.sign) for s in self.slices]

    def count(self, *kinds: Gen) -> int:
        return sum(1 for s in self.slices if s.kind in kinds)

    def to_dict(self) -> Dict:
        return {
            "source": self.source.code,
            "target": self.target.code,
            "slices": [s.to_dict() for s in self.slices],
        }


class Morphism:
    """Finite linear combination of diagrams with a common boundary."""

    def __init__(
        self,
        source: Union[ObjectWord, str],
        target: Union[ObjectWord, str],
        terms: Optional[Mapping[Diagram, Scalar]] = None,
        twisted: bool = False,
    ):
        """
        Args:
            source: bottom boundary word
            target: top boundary word
            terms: diagram -> coefficient; zero coefficients are dropped
            twisted: True when the morphism lives in Heis_{-k}(z, t^{-1}) after omega
        """
        self.source = ObjectWord(source)
        self.target = ObjectWord(target)
        self.twisted = twisted
        clean: Dict[Diagram, Scalar] = {}
        for d, c in (terms or {}).items():
            if d.source != self.source or d.target != self.target:
                raise TypeMismatch(
                    f"diagram {d.source}→{d.target} in morphism {self.source}→{self.target}",
                    expected=(self.source, self.target), found=(d.source, d.target),
                )
            c = Scalar.coerce(c)
            total = clean.get(d, Scalar.zero()) + c
            if total.is_zero():
                clean.pop(d, None)
            else:
                clean[d] = total
        self.terms = clean

    # --- constructors ---

    @classmethod
    def from_diagram(cls, diagram: Diagram, coeff: Scalar = ONE) -> "Morphism":
        return cls(diagram.source, diagram.target, {diagram: coeff})

    @classmethod
    def from_steps(cls, source: Union[ObjectWord, str], steps: Iterable[Step], coeff: Scalar = ONE) -> "Morphism":
        return cls.from_diagram(Diagram.build(source, steps), coeff)

    @classmethod
    def identity(cls, word: Union[ObjectWord, str]) -> "Morphism":
        return cls.from_steps(word, ())

    @classmethod
    def zero(cls, source, target) -> "Morphism":
        return cls(source, target)

    # --- inspection ---

    def items(self) -> Iterator[Tuple[Diagram, Scalar]]:
        return iter(sorted(self.terms.items(), key=lambda kv: json.dumps(kv[0].to_dict(), sort_keys=True)))

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Morphism):
            return NotImplemented
        return (self.source, self.target, self.terms) == (other.source, other.target, other.terms)

    def __hash__(self):
        return hash((self.source, self.target, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"Morphism({render(self)!r})"

    # --- linear structure ---

    def _check_boundary(self, other: "Morphism") -> None:
        if (self.source, self.target) != (other.source, other.target):
            raise TypeMismatch(
                f"cannot add {other.source}→{other.target} to {self.source}→{self.target}",
                expected=(self.source, self.target), found=(other.source, other.target),
            )

    def __add__(self, other: "Morphism") -> "Morphism":
        if not isinstance(other, Morphism):
            return NotImplemented
        self._check_boundary(other)
        out = dict(self.terms)
        for d, c in other.terms.items():
            out[d] = out.get(d, Scalar.zero()) + c
        return Morphism(self.source, self.target, out, self.twisted)

    def __neg__(self) -> "Morphism":
        return self.scale(-ONE)

    def __sub__(self, other: "Morphism") -> "Morphism":
        return self + (-other)

    def scale(self, c) -> "Morphism":
        c = Scalar.coerce(c)
        return Morphism(self.source, self.target, {d: v * c for d, v in self.terms.items()}, self.twisted)

    def __rmul__(self, c) -> "Morphism":
        if isinstance(c, Morphism):
            return NotImplemented
        return self.scale(c)

    def compose(self, other: "Morphism") -> "Morphism":
        return compose(self, other)

    def tensor(self, other: "Morphism") -> "Morphism":
        return tensor(self, other)

    def to_dict(self) -> Dict:
        return {
            "source": self.source.code,
            "target": self.target.code,
            "twisted": self.twisted,
            "terms": [
                {"coeff": render_scalar(c), "slices": [s.to_dict() for s in d.slices]}
                for d, c in self.items()
            ],
        }


# --- composition and tensor product ---

def compose(f: Morphism, g: Morphism) -> Morphism:
    """f ∘ g, with g drawn at the bottom."""
    if f.source != g.target:
        raise TypeMismatch(f"cannot compose {f.source}→{f.target} after {g.source}→{g.target}",
                           expected=f.source, found=g.target)
    out: Dict[Diagram, Scalar] = {}
    for dg, cg in g.terms.items():
        for df, cf in f.terms.items():
            d = Diagram(dg.source, df.target, dg.slices + df.slices)
            out[d] = out.get(d, Scalar.zero()) + cg * cf
    return Morphism(g.source, f.target, out, f.twisted or g.twisted)


def tensor_diagrams(a: Diagram, b: Diagram) -> Diagram:
    """a drawn left of b; all slices of a sit below all slices of b."""
    lower = tuple(s.shifted(0, EMPTY, b.source) for s in a.slices)
    upper = tuple(s.shifted(len(a.target), a.target, EMPTY) for s in b.slices)
    return Diagram(a.source + b.source, a.target + b.target, lower + upper)


def tensor(f: Morphism, g: Morphism) -> Morphism:
    out: Dict[Diagram, Scalar] = {}
    for df, cf in f.terms.items():
        for dg, cg in g.terms.items():
            d = tensor_diagrams(df, dg)
            out[d] = out.get(d, Scalar.zero()) + cf * cg
    return Morphism(f.source + g.source, f.target + g.target, out, f.twisted or g.twisted)


def tensor_all(*parts: Morphism) -> Morphism:
    result = Morphism.identity(EMPTY)
    for part in parts:
        result = tensor(result, part)
    return result


def compose_all(*parts: Morphism) -> Morphism:
    """parts[0] ∘ parts[1] ∘ ... (first factor on top)."""
    result = parts[-1]
    for part in reversed(parts[:-1]):
        result = compose(part, result)
    return result


# --- library composites ---

def generator(kind: Union[Gen, str], label: int = 0, orientation: str = "", sign: str = "") -> Morphism:
    """A single generator on its own boundary."""
    kind = Gen(kind)
    needed, _ = ARITY[kind]
    return Morphism.from_steps(needed, [(kind, 0, label, orientation, sign)])


def crossing_steps(kind: str, position: int, positive: bool = True) -> List[Step]:
    """
    Primitive slices of the crossing whose bottom-left strand sits at position.
    kind: "up" (↑↑), "right" (↑↓→↓↑), "left" (↓↑→↑↓) or "down" (↓↓).
    """
    x = Gen.CROSS_POS if positive else Gen.CROSS_NEG
    p = position
    if kind == "up":
        return [(x, p)]
    if kind == "right":
        return [(Gen.CUP_RIGHT, p), (x, p + 1), (Gen.CAP_RIGHT, p + 2)]
    if kind == "left":
        return [(Gen.CUP_LEFT, p + 2), (x, p + 1), (Gen.CAP_LEFT, p)]
    if kind == "down":
        return [(Gen.CUP_RIGHT, p), (Gen.CUP_RIGHT, p + 1), (x, p + 2),
                (Gen.CAP_RIGHT, p + 3), (Gen.CAP_RIGHT, p + 2)]
    raise ParameterMismatch(f"unknown crossing kind {kind!r}")


CROSSING_SOURCES = {"up": "UU", "right": "UD", "left": "DU", "down": "DD"}


def crossing(kind: str, positive: bool = True) -> Morphism:
    return Morphism.from_steps(CROSSING_SOURCES[kind], crossing_steps(kind, 0, positive))


def bubble(orientation: str, sign: str = PLAIN, label: int = 0) -> Morphism:
    return generator(Gen.BUBBLE, label, orientation, sign)


def dotted_loop(orientation: str, dots: int) -> Morphism:
    """A closed circle built from cups and caps carrying `dots` on its ↑ side."""
    if orientation == CCW:
        steps = [(Gen.CUP_RIGHT, 0), (Gen.DOT_UP, 1, dots), (Gen.CAP_LEFT, 0)]
    else:
        steps = [(Gen.CUP_LEFT, 0), (Gen.DOT_UP, 0, dots), (Gen.CAP_RIGHT, 0)]
    return Morphism.from_steps(EMPTY, steps)


def curl(side: str, dots: int = 0, positive: bool = True) -> Morphism:
    """Curl on an upward strand; side "left" puts the loop to the left of the strand."""
    x = Gen.CROSS_POS if positive else Gen.CROSS_NEG
    if side == "left":
        steps = [(Gen.CUP_RIGHT, 0), (Gen.DOT_UP, 1, dots), (x, 1), (Gen.CAP_LEFT, 0)]
    else:
        steps = [(Gen.CUP_LEFT, 1), (Gen.DOT_UP, 1, dots), (x, 0), (Gen.CAP_RIGHT, 1)]
    return Morphism.from_steps(UP, steps)


# --- symmetries ---

_ROTATED = {
    Gen.DOT_UP: Gen.DOT_DOWN,
    Gen.DOT_DOWN: Gen.DOT_UP,
    Gen.CUP_RIGHT: Gen.CAP_LEFT,
    Gen.CAP_LEFT: Gen.CUP_RIGHT,
    Gen.CAP_RIGHT: Gen.CUP_LEFT,
    Gen.CUP_LEFT: Gen.CAP_RIGHT,
    Gen.BUBBLE: Gen.BUBBLE,
}


def _rotate_diagram(d: Diagram) -> Diagram:
    steps: List[Step] = []
    for s in reversed(d.slices):
        needed, produced = ARITY[s.kind]
        p = len(s.output) - s.position - len(produced)
        if s.kind in (Gen.CROSS_POS, Gen.CROSS_NEG):
            steps.extend(crossing_steps("down", p, s.kind == Gen.CROSS_POS))
        else:
            steps.append((_ROTATED[s.kind], p, s.label, s.orientation, s.sign))
    return Diagram.build(d.target.dual(), steps)


def rotate_180(f: Morphism) -> Morphism:
    """The strictly pivotal duality: rotate every diagram through 180°."""
    out = {_rotate_diagram(d): c for d, c in f.terms.items()}
    return Morphism(f.target.dual(), f.source.dual(), out, f.twisted)


_MIRRORED = {
    Gen.DOT_UP: Gen.DOT_DOWN,
    Gen.DOT_DOWN: Gen.DOT_UP,
    Gen.CUP_RIGHT: Gen.CAP_RIGHT,
    Gen.CAP_RIGHT: Gen.CUP_RIGHT,
    Gen.CUP_LEFT: Gen.CAP_LEFT,
    Gen.CAP_LEFT: Gen.CUP_LEFT,
    Gen.BUBBLE: Gen.BUBBLE,
}

_SIGNED = (Gen.CROSS_POS, Gen.CROSS_NEG, Gen.CUP_LEFT, Gen.CAP_LEFT, Gen.BUBBLE)


def _mirror_diagram(d: Diagram) -> Tuple[Diagram, int]:
    steps: List[Step] = []
    for s in reversed(d.slices):
        if s.kind in (Gen.CROSS_POS, Gen.CROSS_NEG):
            steps.extend(crossing_steps("down", s.position, s.kind == Gen.CROSS_POS))
        elif s.kind == Gen.BUBBLE:
            flipped = CW if s.orientation == CCW else CCW
            steps.append((Gen.BUBBLE, s.position, s.label, flipped, s.sign))
        else:
            steps.append((_MIRRORED[s.kind], s.position, s.label))
    sign = -1 if d.count(*_SIGNED) % 2 else 1
    return Diagram.build(d.target.flipped(), steps), sign


def omega(f: Morphism, k: int = 0) -> Morphism:
    """
    Mirror in a horizontal plane with sign (-1)^(crossings + leftward cups/caps),
    landing in Heis_{-k}(z, t^{-1}); every bubble counts as one leftward cup or cap.
    The level k only tags the result; the diagrams do not depend on it.
    """
    out: Dict[Diagram, Scalar] = {}
    for d, c in f.terms.items():
        m, sign = _mirror_diagram(d)
        out[m] = out.get(m, Scalar.zero()) + c * sign
    logger.debug("omega at level %d on %d terms", k, len(out))
    return Morphism(f.target.flipped(), f.source.flipped(), out, not f.twisted)


# --- text format ---

def _atom_text(s: Slice) -> str:
    if s.kind in (Gen.DOT_UP, Gen.DOT_DOWN):
        return f"{s.kind.value}({s.label})"
    if s.kind == Gen.BUBBLE:
        return f"bub({s.orientation},{_SIGN_TOKENS[s.sign]},{s.label})"
    return s.kind.value


def _identity_text(word: ObjectWord) -> List[str]:
    return ["1u" if letter == UP else "1d" for letter in word]


def render_diagram(d: Diagram) -> str:
    """Composition of one factor per slice, top slice first."""
    if not d.slices:
        return " * ".join(_identity_text(d.source)) or "id"
    factors = []
    for s in reversed(d.slices):
        width = len(ARITY[s.kind][0])
        parts = (_identity_text(s.context[:s.position]) + [_atom_text(s)]
                 + _identity_text(s.context[s.position + width:]))
        factors.append(" * ".join(parts))
    return " . ".join(f"({f})" if " * " in f else f for f in factors)


def render(f: Morphism) -> str:
    if f.is_zero():
        return "0"
    return " + ".join(f"[{render_scalar(c)}] {render_diagram(d)}" for d, c in f.items())


def _sum(tokens) -> Morphism:
    result = tokens[0]
    for i in range(1, len(tokens), 2):
        result = result + tokens[i + 1] if tokens[i] == "+" else result - tokens[i + 1]
    return result


def _term(tokens) -> Morphism:
    if len(tokens) == 2:
        return tokens[1].scale(tokens[0])
    return tokens[0]


def _build_grammar() -> pp.ParserElement:
    morphism = pp.Forward()
    lpar, rpar, comma = map(pp.Suppress, "(),")
    integer = pp.Regex(r"[+-]?\d+").set_parse_action(lambda t: int(t[0]))

    def fixed(token: str, build):
        return pp.Keyword(token).set_parse_action(lambda: build())

    identity = (
        fixed("1u", lambda: Morphism.identity(UP))
        | fixed("1d", lambda: Morphism.identity(DOWN))
        | fixed("id", lambda: Morphism.identity(EMPTY))
    )
    dots = (
        (pp.Keyword("dotu") + lpar + integer + rpar).set_parse_action(lambda t: generator(Gen.DOT_UP, t[1]))
        | (pp.Keyword("dotd") + lpar + integer + rpar).set_parse_action(lambda t: generator(Gen.DOT_DOWN, t[1]))
    )
    crossings = (
        pp.Literal("x+").set_parse_action(lambda: generator(Gen.CROSS_POS))
        | pp.Literal("x-").set_parse_action(lambda: generator(Gen.CROSS_NEG))
    )
    cups = pp.MatchFirst([fixed(g.value, (lambda g=g: generator(g)))
                          for g in (Gen.CUP_RIGHT, Gen.CAP_RIGHT, Gen.CUP_LEFT, Gen.CAP_LEFT)])
    sign_token = pp.one_of("plain plus minus").set_parse_action(
        lambda t: {v: k for k, v in _SIGN_TOKENS.items()}[t[0]])
    bub = (pp.Keyword("bub") + lpar + pp.one_of("ccw cw") + comma + sign_token + comma + integer + rpar)
    bub.set_parse_action(lambda t: bubble(t[1], t[2], t[3]))

    atom = identity | dots | crossings | cups | bub | (lpar + morphism + rpar)
    factor = (atom + pp.ZeroOrMore(pp.Suppress("*") + atom)).set_parse_action(lambda t: tensor_all(*t))
    expr = (factor + pp.ZeroOrMore(pp.Suppress(".") + factor)).set_parse_action(lambda t: compose_all(*t))
    coeff = pp.Regex(r"\[[^\]]*\]").set_parse_action(lambda t: parse_scalar(t[0][1:-1]))
    term = (pp.Optional(coeff) + expr).set_parse_action(_term)
    morphism <<= (term + pp.ZeroOrMore(pp.one_of("+ -") + term)).set_parse_action(_sum)
    return morphism


_GRAMMAR: Optional[pp.ParserElement] = None


def parse(text: str) -> Morphism:
    """
    Parse the diagram language, e.g. "[1 z^1] (x+) + [1] (1u * 1u)".
    Raises DiagramSyntaxError with the failing position, TypeMismatch on bad boundaries.
    """
    global _GRAMMAR
    if _GRAMMAR is None:
        _GRAMMAR = _build_grammar()
    try:
        return _GRAMMAR.parse_string(text, parse_all=True)[0]
    except pp.ParseException as e:
        raise DiagramSyntaxError(f"cannot parse diagram: {e.msg}", e.loc) from e


# --- JSON ---

def to_json(f: Morphism) -> str:
    return json.dumps(f.to_dict(), sort_keys=True, ensure_ascii=False)


def from_json(text: Union[str, Dict]) -> Morphism:
    data = json.loads(text) if isinstance(text, str) else text
    source = ObjectWord(data["source"])
    out: Dict[Diagram, Scalar] = {}
    for entry in data["terms"]:
        steps = [(Gen(s["kind"]), s["position"], s["label"], s["orientation"], s["sign"])
                 for s in entry["slices"]]
        d = Diagram.build(source, steps)
        out[d] = out.get(d, Scalar.zero()) + coerce_scalar(entry["coeff"])
    return Morphism(source, data["target"], out, data.get("twisted", False))


def word_of(value: Union[ObjectWord, str, Sequence[str]]) -> ObjectWord:
    return value if isinstance(value, ObjectWord) else ObjectWord(value)
