"""
Hecke: affine Hecke algebras AH_n and cyclotomic quotients H_n^f.

Strands are numbered right to left: x_1 is the rightmost strand and τ_i
crosses strands i and i+1. An exponent vector r stores r_1 first. Basis words
are x_1^{r_1}..x_n^{r_n} τ_g; τ_g is independent of the reduced expression
chosen for g, and the lexicographically smallest one is used when rendering.
"""

import itertools
import logging
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import pyparsing as pp
import sympy

from cache_manager import cache_manager
from error_handler import DiagramSyntaxError, ParameterMismatch
from scalars import LaurentPoly, Scalar, coerce_scalar, invert_unit, parse_scalar, render_scalar, specialize

logger = logging.getLogger("heiscat.hecke")

Perm = Tuple[int, ...]
Exps = Tuple[int, ...]
Key = Tuple[Exps, Perm]

Z = Scalar.monomial(1, 0)


# --- permutations ---

def identity_perm(n: int) -> Perm:
    return tuple(range(n))


def simple(i: int, n: int) -> Perm:
    """s_i as a permutation of {0..n-1}; swaps positions i-1 and i."""
    p = list(range(n))
    p[i - 1], p[i] = p[i], p[i - 1]
    return tuple(p)


def compose(a: Perm, b: Perm) -> Perm:
    """(a ∘ b)(j) = a(b(j))."""
    return tuple(a[b[j]] for j in range(len(b)))


def length(g: Perm) -> int:
    return sum(1 for i in range(len(g)) for j in range(i + 1, len(g)) if g[i] > g[j])


def reduced_word(g: Perm) -> List[int]:
    """Lexicographically smallest reduced word (i_1, ..., i_m) with g = s_{i_1}..s_{i_m}."""

    def compute() -> Tuple[int, ...]:
        word = []
        h = g
        n = len(h)
        while length(h) > 0:
            for i in range(1, n):
                candidate = compose(simple(i, n), h)
                if length(candidate) < length(h):
                    word.append(i)
                    h = candidate
                    break
        return tuple(word)

    return list(cache_manager.get_or_compute("hecke", ("word", tuple(g)), compute))


# --- elements ---

class HeckeElement:
    """Scalar-linear combination of x^r τ_g on n strands."""

    __slots__ = ("n", "_terms")

    def __init__(self, n: int, terms: Optional[Mapping[Key, Scalar]] = None):
        self.n = n
        clean: Dict[Key, Scalar] = {}
        for (r, g), c in (terms or {}).items():
            if len(r) != n or len(g) != n:
                raise ParameterMismatch(f"term {(r, g)} does not live on {n} strands")
            key = (tuple(r), tuple(g))
            total = clean.get(key, Scalar.zero()) + Scalar.coerce(c)
            if total.is_zero():
                clean.pop(key, None)
            else:
                clean[key] = total
        self._terms = clean

    # --- construction ---

    @classmethod
    def one(cls, n: int) -> "HeckeElement":
        return cls(n, {((0,) * n, identity_perm(n)): Scalar.one()})

    @classmethod
    def zero(cls, n: int) -> "HeckeElement":
        return cls(n)

    @classmethod
    def scalar(cls, n: int, c: Scalar) -> "HeckeElement":
        return cls(n, {((0,) * n, identity_perm(n)): c})

    @classmethod
    def x(cls, i: int, n: int, power: int = 1) -> "HeckeElement":
        r = [0] * n
        r[i - 1] = power
        return cls(n, {(tuple(r), identity_perm(n)): Scalar.one()})

    @classmethod
    def monomial(cls, r: Sequence[int], g: Optional[Perm] = None, coeff: Scalar = None) -> "HeckeElement":
        n = len(r)
        return cls(n, {(tuple(r), g or identity_perm(n)): coeff if coeff is not None else Scalar.one()})

    @classmethod
    def tau(cls, i: int, n: int) -> "HeckeElement":
        return cls(n, {((0,) * n, simple(i, n)): Scalar.one()})

    @classmethod
    def tau_inverse(cls, i: int, n: int) -> "HeckeElement":
        return cls.tau(i, n) - cls.scalar(n, Z)

    @classmethod
    def tau_word(cls, word: Iterable[int], n: int) -> "HeckeElement":
        result = cls.one(n)
        for i in word:
            result = result * cls.tau(i, n)
        return result

    # --- inspection ---

    def items(self):
        return self._terms.items()

    @property
    def terms(self) -> Dict[Key, Scalar]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, r: Exps, g: Perm) -> Scalar:
        return self._terms.get((tuple(r), tuple(g)), Scalar.zero())

    # --- arithmetic ---

    def _check(self, other: "HeckeElement"):
        if other.n != self.n:
            raise ParameterMismatch(f"strand counts differ: {self.n} vs {other.n}")

    def __add__(self, other: "HeckeElement") -> "HeckeElement":
        self._check(other)
        out = dict(self._terms)
        for key, c in other._terms.items():
            out[key] = out.get(key, Scalar.zero()) + c
        return HeckeElement(self.n, out)

    def __neg__(self) -> "HeckeElement":
        return HeckeElement(self.n, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other: "HeckeElement") -> "HeckeElement":
        return self + (-other)

    def scale(self, c) -> "HeckeElement":
        c = Scalar.coerce(c)
        return HeckeElement(self.n, {k: v * c for k, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, LaurentPoly)):
            return self.scale(other)
        return ah_mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, LaurentPoly)):
            return self.scale(other)
        return NotImplemented

    def __eq__(self, other) -> bool:
        if not isinstance(other, HeckeElement):
            return NotImplemented
        return self.n == other.n and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.n, frozenset(self._terms.items())))

    def __repr__(self) -> str:
        return f"HeckeElement(n={self.n}, {hecke_render(self)!r})"

    def __str__(self) -> str:
        return hecke_render(self)


# --- affine Hecke multiplication ---

def _divided_difference_times_x(r: Exps, i: int) -> Dict[Exps, int]:
    """x_{i+1} ∂_i(x^r) with ∂_i f = (f - s_i f)/(x_{i+1} - x_i)."""
    a, b = r[i - 1], r[i]
    d = a - b
    out: Dict[Exps, int] = {}
    if d == 0:
        return out
    if d > 0:
        # -(x_i x_{i+1})^b Σ_j x_i^{d-1-j} x_{i+1}^j
        for j in range(d):
            e = list(r)
            e[i - 1] = b + d - 1 - j
            e[i] = b + j + 1
            out[tuple(e)] = out.get(tuple(e), 0) - 1
    else:
        # (x_i x_{i+1})^a Σ_j x_{i+1}^{e-1-j} x_i^j with e = b - a
        gap = -d
        for j in range(gap):
            e = list(r)
            e[i - 1] = a + j
            e[i] = a + gap - j
            out[tuple(e)] = out.get(tuple(e), 0) + 1
    return out


def _swap(r: Exps, i: int) -> Exps:
    e = list(r)
    e[i - 1], e[i] = e[i], e[i - 1]
    return tuple(e)


def tau_left(i: int, element: HeckeElement) -> HeckeElement:
    """τ_i · element, exact in AH_n; exponents stay inside the span of the input."""
    n = element.n
    s = simple(i, n)
    out: Dict[Key, Scalar] = {}

    def add(key: Key, c: Scalar):
        total = out.get(key, Scalar.zero()) + c
        if total.is_zero():
            out.pop(key, None)
        else:
            out[key] = total

    for (r, g), c in element.items():
        sg = compose(s, g)
        r_swapped = _swap(r, i)
        if length(sg) > length(g):
            add((r_swapped, sg), c)
        else:
            add((r_swapped, g), c * Z)
            add((r_swapped, sg), c)
        for e, m in _divided_difference_times_x(r, i).items():
            add((e, g), c * Z * m)
    return HeckeElement(n, out)


def ah_mul(a: HeckeElement, b: HeckeElement) -> HeckeElement:
    """Product in AH_n by pushing each τ of the left factor through x's of the right."""
    a._check(b)
    total = HeckeElement.zero(a.n)
    for (r, g), c in a.items():
        right = b
        for i in reversed(reduced_word(g)):
            right = tau_left(i, right)
        shifted = {
            (tuple(x + y for x, y in zip(r, s)), h): c * d for (s, h), d in right.items()
        }
        total = total + HeckeElement(a.n, shifted)
    return total


# --- cyclotomic quotients ---

class CyclotomicPoly:
    """f(w) = f_0 w^l + f_1 w^{l-1} + ... + f_l with f_0 = 1 and f_l a unit."""

    def __init__(self, coeffs: Sequence):
        coeffs = [coerce_scalar(c) for c in coeffs]
        if len(coeffs) < 2:
            raise ParameterMismatch("a cyclotomic polynomial needs degree >= 1")
        if coeffs[0] != Scalar.one():
            raise ParameterMismatch("f_0 must be 1")
        if not coeffs[-1].is_unit():
            raise ParameterMismatch(f"f_l = {coeffs[-1]} must be a unit")
        self.coeffs: Tuple[Scalar, ...] = tuple(coeffs)

    @property
    def l(self) -> int:
        return len(self.coeffs) - 1

    def __eq__(self, other) -> bool:
        return isinstance(other, CyclotomicPoly) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return "CyclotomicPoly(" + ", ".join(render_scalar(c) for c in self.coeffs) + ")"

    def to_json(self) -> Dict:
        return {"coeffs": [render_scalar(c) for c in self.coeffs]}

    def evaluate_x(self, i: int, n: int) -> HeckeElement:
        """f(x_i) as an element of AH_n."""
        total = HeckeElement.zero(n)
        for power, c in zip(range(self.l, -1, -1), self.coeffs):
            total = total + HeckeElement.x(i, n, power).scale(c)
        return total


def _x1_left(element: HeckeElement, f: CyclotomicPoly, inverse: bool = False) -> HeckeElement:
    """x_1^{±1} · element for element in the Ariki–Koike range."""
    l = f.l
    out = HeckeElement.zero(element.n)
    for (r, g), c in element.items():
        a = r[0]
        if not inverse and a + 1 < l:
            out = out + HeckeElement(element.n, {((a + 1,) + r[1:], g): c})
        elif not inverse:
            # x_1^l = -(f_1 x_1^{l-1} + ... + f_l)
            for j in range(1, l + 1):
                out = out + HeckeElement(element.n, {((l - j,) + r[1:], g): -c * f.coeffs[j]})
        elif a > 0:
            out = out + HeckeElement(element.n, {((a - 1,) + r[1:], g): c})
        else:
            # x_1^{-1} = -f_l^{-1}(x_1^{l-1} + f_1 x_1^{l-2} + ... + f_{l-1})
            inv = invert_unit(f.coeffs[-1])
            for j in range(l):
                out = out + HeckeElement(element.n, {((l - 1 - j,) + r[1:], g): -c * inv * f.coeffs[j]})
    return out


def _x_left(i: int, element: HeckeElement, f: CyclotomicPoly, inverse: bool = False) -> HeckeElement:
    """x_i^{±1} · element via x_i = τ_{i-1} x_{i-1} τ_{i-1}."""
    if i == 1:
        return _x1_left(element, f, inverse)
    if not inverse:
        return tau_left(i - 1, _x_left(i - 1, tau_left(i - 1, element), f))

    def tau_inv(v: HeckeElement) -> HeckeElement:
        return tau_left(i - 1, v) - v.scale(Z)

    return tau_inv(_x_left(i - 1, tau_inv(element), f, inverse=True))


def cyclotomic_reduce(a: HeckeElement, f: CyclotomicPoly) -> HeckeElement:
    """Image of an AH_n element in H_n^f, in the basis x^r τ_g with 0 <= r_i < l."""
    total = HeckeElement.zero(a.n)
    for (r, g), c in a.items():
        v = HeckeElement(a.n, {((0,) * a.n, g): c})
        for i in range(a.n, 0, -1):
            power = r[i - 1]
            for _ in range(abs(power)):
                v = _x_left(i, v, f, inverse=power < 0)
        total = total + v
    return total


def hecke_mul(a: HeckeElement, b: HeckeElement, f: CyclotomicPoly) -> HeckeElement:
    """Product in H_n^f; the right factor must already be in the Ariki–Koike range."""
    a._check(b)
    total = HeckeElement.zero(a.n)
    for (r, g), c in a.items():
        v = b.scale(c)
        for i in reversed(reduced_word(g)):
            v = tau_left(i, v)
        for i in range(a.n, 0, -1):
            power = r[i - 1]
            for _ in range(abs(power)):
                v = _x_left(i, v, f, inverse=power < 0)
        total = total + v
    return total


def ak_basis(n: int, l: int) -> List[Key]:
    """The Ariki–Koike basis {x^r τ_g : 0 <= r_i < l}."""
    perms = sorted(itertools.permutations(range(n)), key=lambda g: (length(g), g))
    return [
        (tuple(r), tuple(g))
        for g in perms
        for r in itertools.product(range(l), repeat=n)
    ]


def embed(a: HeckeElement, extra: int = 1) -> HeckeElement:
    """H_n^f ↪ H_{n+extra}^f on the rightmost n strands."""
    n = a.n + extra
    return HeckeElement(
        n,
        {(r + (0,) * extra, g + tuple(range(a.n, n))): c for (r, g), c in a.items()},
    )


# --- trace and Mackey decomposition ---

def _split_coset(g: Perm) -> Tuple[Perm, Perm]:
    """g = g1 s_n g2 with g1, g2 fixing the last strand and lengths adding up."""
    n1 = len(g)
    n = n1 - 1
    sn = simple(n, n1)
    for g1 in itertools.permutations(range(n)):
        g1 = tuple(g1) + (n,)
        rest = compose(_inverse(g1), g)
        rest2 = compose(sn, rest)
        if rest2[n] == n and length(g1) + 1 + length(rest2) == length(g):
            return g1, rest2
    raise ParameterMismatch(f"{g} does not lie in the double coset of s_{n}")


def _inverse(g: Perm) -> Perm:
    out = [0] * len(g)
    for i, j in enumerate(g):
        out[j] = i
    return tuple(out)


def trace(a: HeckeElement, f: CyclotomicPoly) -> HeckeElement:
    """
    tr_n^f: H_{n+1}^f -> H_n^f. On the Ariki–Koike basis it keeps x^r τ_g with
    g fixing strand n+1 and r_{n+1} = 0, and kills everything else.
    """
    reduced = cyclotomic_reduce(a, f)
    n = a.n - 1
    out: Dict[Key, Scalar] = {}
    for (r, g), c in reduced.items():
        if g[n] == n and r[n] == 0:
            out[(r[:n], g[:n])] = c
    return HeckeElement(n, out)


class MackeyDecomposition:
    """Preimage (Σ u ⊗ v, [w_0..w_{l-1}]) of an element of H_{n+1}^f."""

    def __init__(self, n: int, l: int):
        self.n = n
        self.middle: List[Tuple[HeckeElement, HeckeElement]] = []
        self.tail: List[HeckeElement] = [HeckeElement.zero(n) for _ in range(l)]

    def reassemble(self, f: CyclotomicPoly) -> HeckeElement:
        n1 = self.n + 1
        total = HeckeElement.zero(n1)
        tau_n = HeckeElement.tau(self.n, n1) if self.n > 0 else None
        for u, v in self.middle:
            total = total + hecke_mul(hecke_mul(embed(u), tau_n, f), embed(v), f)
        for power, w in enumerate(self.tail):
            total = total + hecke_mul(embed(w), HeckeElement.x(n1, n1, power), f)
        return total


def mackey_decompose(a: HeckeElement, f: CyclotomicPoly) -> MackeyDecomposition:
    """Decompose along H_n ⊗_{H_{n-1}} H_n ⊕ H_n^{⊕l} -> H_{n+1}, (u⊗v, w) ↦ uτ_n v + Σ w_r x_{n+1}^r."""
    reduced = cyclotomic_reduce(a, f)
    n = a.n - 1
    result = MackeyDecomposition(n, f.l)
    for (r, g), c in reduced.items():
        head = r[:n]
        power = r[n]
        if g[n] == n:
            w = HeckeElement(n, {(head, g[:n]): c})
            result.tail[power] = result.tail[power] + w
            continue
        g1, g2 = _split_coset(g)
        u = HeckeElement(n, {(head, g1[:n]): c})
        v_terms = {(tuple(power if j == n - 1 else 0 for j in range(n)), g2[:n]): Scalar.one()}
        result.middle.append((u, HeckeElement(n, v_terms)))
        # x_{n+1}^a τ_n = τ_n x_n^a + z Σ_j x_n^{a-1-j} x_{n+1}^{j+1}
        for j in range(power):
            left = hecke_mul(
                u, HeckeElement.x(n, n, power - 1 - j), f
            )
            w = hecke_mul(left, HeckeElement(n, {((0,) * n, g2[:n]): Scalar.one()}), f).scale(Z)
            result.tail[j + 1] = result.tail[j + 1] + w
    return result


def right_coset_basis(n: int, l: int) -> List[HeckeElement]:
    """Basis of H_n^f as a right H_{n-1}^f-module: τ_j τ_{j+1}..τ_{n-1} x_n^a."""
    out = []
    for j in range(1, n + 1):
        word = list(range(j, n))
        for a in range(l):
            out.append(ah_mul(HeckeElement.tau_word(word, n), HeckeElement.x(n, n, a)))
    return out


def mackey_matrix_rank(n: int, f: CyclotomicPoly, point: Mapping[str, Fraction]) -> Tuple[int, int]:
    """(rank of the images of a basis of the Mackey source, dim H_{n+1}^f) at a rational point."""
    l = f.l
    n1 = n + 1
    images: List[HeckeElement] = []
    basis_n = [HeckeElement(n, {key: Scalar.one()}) for key in ak_basis(n, l)]
    if n > 0:
        tau_n = HeckeElement.tau(n, n1)
        for left in right_coset_basis(n, l):
            left_tau = hecke_mul(cyclotomic_reduce(embed(left), f), tau_n, f)
            for b in basis_n:
                images.append(hecke_mul(left_tau, embed(b), f))
    for power in range(l):
        for b in basis_n:
            images.append(hecke_mul(embed(b), HeckeElement.x(n1, n1, power), f))
    keys = ak_basis(n1, l)
    rank = rational_rank(images, keys, point)
    logger.debug("Mackey map n=%d l=%d: rank %d of %d", n, l, rank, len(keys))
    return rank, len(keys)


def rational_rank(elements: Sequence[HeckeElement], keys: Sequence[Key], point: Mapping[str, Fraction]) -> int:
    def entry(i: int, j: int):
        value = specialize(elements[i].coefficient(*keys[j]), point)
        return sympy.Rational(value.numerator, value.denominator)

    if not elements:
        return 0
    return sympy.Matrix(len(elements), len(keys), entry).rank()


# --- text format ---

_SCALAR = pp.Group(pp.Optional(pp.Suppress("[") + pp.SkipTo("]") + pp.Suppress("]")))
_XPOW = pp.Regex(r"x(?P<index>\d+)(\^(?P<power>-?\d+))?")
_SWORD = pp.Group(pp.Optional(pp.Suppress("s(") + pp.ZeroOrMore(pp.Word(pp.nums)) + pp.Suppress(")")))
_TERM = pp.Group(_SCALAR + pp.Group(pp.ZeroOrMore(_XPOW)) + _SWORD)
_ELEMENT = _TERM + pp.ZeroOrMore(pp.Suppress("+") + _TERM)


def hecke_parse(text: str, n: int) -> HeckeElement:
    """Parse `[c] x1^r1 ... xn^rn s(i1 i2 ...)` terms joined by `+`."""
    if text.strip() == "0":
        return HeckeElement.zero(n)
    try:
        parsed = _ELEMENT.parse_string(text.strip(), parse_all=True)
    except pp.ParseException as e:
        raise DiagramSyntaxError(f"bad Hecke element {text!r}: {e.msg}", e.loc) from e
    total = HeckeElement.zero(n)
    for term in parsed:
        scalar_part, xpows, word = term[0], term[1], term[2]
        coeff = parse_scalar(scalar_part[0]) if len(scalar_part) else Scalar.one()
        r = [0] * n
        for match in xpows:
            m = _XPOW.re.match(match)
            index = int(m.group("index"))
            if not 1 <= index <= n:
                raise DiagramSyntaxError(f"x{index} is not a strand of AH_{n}", 0)
            r[index - 1] += int(m.group("power") or 1)
        letters = [int(i) for i in word]
        if any(not 1 <= i < n for i in letters):
            raise DiagramSyntaxError(f"s({' '.join(map(str, letters))}) is not a word in S_{n}", 0)
        total = total + HeckeElement.monomial(r).scale(coeff) * HeckeElement.tau_word(letters, n)
    return total


def hecke_render(a: HeckeElement) -> str:
    if a.is_zero():
        return "0"
    parts = []
    for (r, g), c in sorted(a.items(), key=lambda kv: (length(kv[0][1]), kv[0][1], kv[0][0])):
        factors = [f"x{i + 1}" + (f"^{e}" if e != 1 else "") for i, e in enumerate(r) if e]
        if g != identity_perm(a.n):
            factors.append("s(" + " ".join(map(str, reduced_word(g))) + ")")
        if not factors:
            parts.append(render_scalar(c, compact=True))
        elif c == Scalar.one():
            parts.append(" ".join(factors))
        else:
            parts.append(f"[{render_scalar(c, compact=True)}] " + " ".join(factors))
    return " + ".join(parts)


def cyclotomic_from_json(data: Mapping) -> CyclotomicPoly:
    """`{"coeffs": [f_0, f_1, ..., f_l]}`; entries are ints or scalar text."""
    if "coeffs" not in data:
        raise ParameterMismatch("polynomial JSON needs a 'coeffs' list")
    return CyclotomicPoly(data["coeffs"])
