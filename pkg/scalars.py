"""
Scalars: exact Laurent polynomials over the integers.

Scalar lives in Z[z^{±1}, t^{±1}], QScalar in Z[q^{±1}]; both share one sparse
representation (exponent tuple -> nonzero int) kept in canonical sorted order
so that equality and hashing are structural. Specialisation goes to
fractions.Fraction.
"""

from fractions import Fraction
from typing import Dict, Iterable, Iterator, Mapping, Optional, Tuple, Union

import pyparsing as pp

from error_handler import DiagramSyntaxError, NotAUnit, ParameterMismatch, ZeroSubstitution

Rational = Fraction
Exponent = Tuple[int, ...]


class LaurentPoly:
    """Immutable sparse Laurent polynomial with integer coefficients."""

    variables: Tuple[str, ...] = ()
    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Mapping[Exponent, int]] = None):
        clean: Dict[Exponent, int] = {}
        for exp, coeff in (terms or {}).items():
            if len(exp) != len(self.variables):
                raise ValueError(f"exponent {exp} does not match variables {self.variables}")
            if coeff:
                key = tuple(int(e) for e in exp)
                clean[key] = clean.get(key, 0) + int(coeff)
        self._terms: Tuple[Tuple[Exponent, int], ...] = tuple(
            sorted((e, c) for e, c in clean.items() if c)
        )
        self._hash: Optional[int] = None

    # --- construction ---

    @classmethod
    def constant(cls, c: int) -> "LaurentPoly":
        return cls({(0,) * len(cls.variables): c})

    @classmethod
    def monomial(cls, *exps: int, coeff: int = 1) -> "LaurentPoly":
        return cls({tuple(exps): coeff})

    @classmethod
    def zero(cls) -> "LaurentPoly":
        return cls()

    @classmethod
    def one(cls) -> "LaurentPoly":
        return cls.constant(1)

    @classmethod
    def coerce(cls, value: Union["LaurentPoly", int]) -> "LaurentPoly":
        if isinstance(value, cls):
            return value
        if isinstance(value, int):
            return cls.constant(value)
        raise TypeError(f"cannot use {type(value).__name__} as {cls.__name__}")

    # --- inspection ---

    @property
    def terms(self) -> Dict[Exponent, int]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[Exponent, int]]:
        return iter(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def is_unit(self) -> bool:
        return len(self._terms) == 1 and self._terms[0][1] in (1, -1)

    def degree_span(self, index: int = 0) -> Tuple[int, int]:
        """Minimum and maximum exponent of one variable (0, 0 for zero)."""
        if not self._terms:
            return 0, 0
        exps = [e[index] for e, _ in self._terms]
        return min(exps), max(exps)

    # --- arithmetic ---

    def __add__(self, other):
        try:
            other = self.coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for e, c in other._terms:
            out[e] = out.get(e, 0) + c
        return type(self)(out)

    __radd__ = __add__

    def __neg__(self):
        return type(self)({e: -c for e, c in self._terms})

    def __sub__(self, other):
        try:
            other = self.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return type(self)({e: c * other for e, c in self._terms})
        if not isinstance(other, type(self)):
            return NotImplemented
        out: Dict[Exponent, int] = {}
        for e1, c1 in self._terms:
            for e2, c2 in other._terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return type(self)(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return invert_unit(self) ** (-n)
        result = self.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def shift(self, *exps: int) -> "LaurentPoly":
        """Multiply by the monomial with the given exponents."""
        return type(self)({tuple(a + b for a, b in zip(e, exps)): c for e, c in self._terms})

    # --- comparison ---

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = self.constant(other)
        if not isinstance(other, LaurentPoly) or other.variables != self.variables:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.variables, self._terms))
        return self._hash

    def __repr__(self) -> str:
        return f"{type(self).__name__}({render_scalar(self)!r})"

    def __str__(self) -> str:
        return render_scalar(self)


class Scalar(LaurentPoly):
    """Element of Z[z^{±1}, t^{±1}]; exponent tuples are (z-power, t-power)."""

    variables = ("z", "t")
    __slots__ = ()


class QScalar(LaurentPoly):
    """Element of Z[q^{±1}]; exponent tuples are (q-power,)."""

    variables = ("q",)
    __slots__ = ()


Z = Scalar.monomial(1, 0)
T = Scalar.monomial(0, 1)
ONE = Scalar.one()
ZERO = Scalar.zero()
Q = QScalar.monomial(1)
Q_ONE = QScalar.one()


def zt(a: int = 0, b: int = 0, coeff: int = 1) -> Scalar:
    """The monomial coeff * z^a t^b."""
    return Scalar.monomial(a, b, coeff=coeff)


def scalar_mul(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    return a * b


def invert_unit(a: LaurentPoly) -> LaurentPoly:
    """Inverse of ±(monomial); anything else raises NotAUnit."""
    if not a.is_unit():
        raise NotAUnit(f"{render_scalar(a)} is not a unit")
    (exp, coeff), = a.items()
    return type(a)({tuple(-e for e in exp): coeff})


def specialize(a: LaurentPoly, assignment: Mapping[str, Union[Fraction, int]]) -> Fraction:
    """Exact evaluation at nonzero rational values of the variables."""
    values: Dict[str, Fraction] = {}
    for var in a.variables:
        if var not in assignment:
            raise ParameterMismatch(f"no value assigned to {var}")
        value = Fraction(assignment[var])
        if value == 0:
            raise ZeroSubstitution(f"{var} specialised to 0")
        values[var] = value
    total = Fraction(0)
    for exp, coeff in a.items():
        term = Fraction(coeff)
        for var, e in zip(a.variables, exp):
            term *= values[var] ** e
        total += term
    return total


def specialize_q(a: LaurentPoly, n: int, q: Union[Fraction, int]) -> Fraction:
    """Evaluate at z = q - q^{-1}, t = q^n for a rational q (QScalars at q directly)."""
    q = Fraction(q)
    if q in (0, 1, -1):
        raise ZeroSubstitution(f"q = {q} sends q or z to 0")
    if isinstance(a, QScalar):
        return specialize(a, {"q": q})
    return specialize(a, {"z": q - 1 / q, "t": q ** n})


def q_integer(n: int) -> QScalar:
    """The quantum integer [n]_q = q^{n-1} + q^{n-3} + ... + q^{1-n}."""
    if n == 0:
        return QScalar.zero()
    sign = 1 if n > 0 else -1
    m = abs(n)
    return QScalar({(m - 1 - 2 * i,): sign for i in range(m)})


# --- text format ---

def render_scalar(a: LaurentPoly, compact: bool = False) -> str:
    """
    Render as `-1 z^-1 t^-1 + 2 t`; unit exponents are omitted.
    With compact=True a coefficient ±1 in front of variables is dropped too (`-t^2`).
    """
    if a.is_zero():
        return "0"
    parts = []
    for index, (exp, coeff) in enumerate(a.items()):
        factors = []
        for var, e in zip(a.variables, exp):
            if e == 1:
                factors.append(var)
            elif e != 0:
                factors.append(f"{var}^{e}")
        if compact and factors and abs(coeff) == 1:
            body = " ".join(factors)
        else:
            body = " ".join([str(abs(coeff))] + factors)
        if index == 0:
            parts.append(("-" if coeff < 0 else "") + body)
        else:
            parts.append(("- " if coeff < 0 else "+ ") + body)
    return " ".join(parts)


def _scalar_grammar(variables: Iterable[str]) -> pp.ParserElement:
    power = pp.Group(
        pp.one_of(" ".join(variables))
        + pp.Optional(pp.Suppress("^") + pp.Regex(r"[+-]?\d+"), default="1")
    )
    coeff = pp.Regex(r"-?\d+")
    monomial = pp.Group(
        (coeff + pp.Group(pp.ZeroOrMore(power))) | (pp.Empty().set_parse_action(lambda: "1") + pp.Group(pp.OneOrMore(power)))
    )
    sign = pp.one_of("+ -")
    return pp.Optional(sign) + monomial + pp.ZeroOrMore(sign + monomial)


_GRAMMARS: Dict[type, pp.ParserElement] = {}


def parse_scalar(text: str, cls: type = Scalar) -> LaurentPoly:
    """Parse the scalar text format (also accepts `z`, `-t^2`, `3 - z`)."""
    grammar = _GRAMMARS.get(cls)
    if grammar is None:
        grammar = _GRAMMARS[cls] = _scalar_grammar(cls.variables)
    try:
        tokens = grammar.parse_string(text.strip(), parse_all=True).as_list()
    except pp.ParseException as e:
        raise DiagramSyntaxError(f"bad scalar {text!r}: {e.msg}", e.loc) from e
    result = cls.zero()
    sign = 1
    for token in tokens:
        if token in ("+", "-"):
            sign = -1 if token == "-" else 1
            continue
        coeff_text, powers = token
        exps = [0] * len(cls.variables)
        for var, e in powers:
            exps[cls.variables.index(var)] += int(e)
        result = result + cls({tuple(exps): sign * int(coeff_text)})
        sign = 1
    return result


def coerce_scalar(value: Union[LaurentPoly, int, str], cls: type = Scalar) -> LaurentPoly:
    if isinstance(value, str):
        return parse_scalar(value, cls)
    return cls.coerce(value)
