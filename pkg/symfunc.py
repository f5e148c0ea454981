"""
Symmetric functions: Sym, Sym⊗Sym and the bubble dictionary.

Elements are stored in the elementary basis: a term is a tuple of partitions
(one per tensor slot) mapped to a Scalar coefficient, so e_λ⊗e_μ is the key
(λ, μ). Complete symmetric functions are converted in through the Newton-type
recursion. Bubbles translate through the closed forms below, which cover every
label (fake bubbles included).
"""

import itertools
import logging
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

import sympy

from error_handler import ParameterMismatch, WindowMismatch
from scalars import LaurentPoly, Scalar, render_scalar, specialize, zt

logger = logging.getLogger("heiscat.symfunc")

Partition = Tuple[int, ...]
SymKey = Tuple[Partition, ...]

CW = "cw"
CCW = "ccw"
PLUS = "+"
MINUS = "-"
PLAIN = "plain"
ORIENTATIONS = (CW, CCW)
SIGNS = (PLUS, MINUS)


def merge_partitions(a: Partition, b: Partition) -> Partition:
    return tuple(sorted(a + b, reverse=True))


class SymPoly:
    """Sparse element of Sym^{⊗arity} in the e-basis with Scalar coefficients."""

    arity = 1
    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Mapping[SymKey, Scalar]] = None):
        clean: Dict[SymKey, Scalar] = {}
        for key, coeff in (terms or {}).items():
            if len(key) != self.arity:
                raise ValueError(f"{type(self).__name__} expects {self.arity} partitions, got {key}")
            key = tuple(tuple(sorted(p, reverse=True)) for p in key)
            if any(part <= 0 for p in key for part in p):
                raise ValueError(f"partitions must have positive parts: {key}")
            total = clean.get(key, Scalar.zero()) + Scalar.coerce(coeff)
            if total.is_zero():
                clean.pop(key, None)
            else:
                clean[key] = total
        self._terms: Tuple[Tuple[SymKey, Scalar], ...] = tuple(sorted(clean.items(), key=lambda kv: kv[0]))
        self._hash: Optional[int] = None

    @classmethod
    def one(cls) -> "SymPoly":
        return cls({((),) * cls.arity: Scalar.one()})

    @classmethod
    def zero(cls) -> "SymPoly":
        return cls()

    @classmethod
    def scalar(cls, c: Scalar) -> "SymPoly":
        return cls({((),) * cls.arity: c})

    @classmethod
    def e(cls, n: int, slot: int = 0) -> "SymPoly":
        """e_n placed in one tensor slot (e_0 = 1, e_n = 0 for n < 0)."""
        if n < 0:
            return cls.zero()
        key = [()] * cls.arity
        key[slot] = (n,) if n > 0 else ()
        return cls({tuple(key): Scalar.one()})

    @classmethod
    def h(cls, n: int, slot: int = 0) -> "SymPoly":
        return embed_slot(h_from_e(n), cls, slot)

    # --- inspection ---

    def items(self) -> Iterator[Tuple[SymKey, Scalar]]:
        return iter(self._terms)

    @property
    def terms(self) -> Dict[SymKey, Scalar]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def coefficient(self, key: SymKey) -> Scalar:
        return dict(self._terms).get(key, Scalar.zero())

    def scalar_part(self) -> Scalar:
        return self.coefficient(((),) * self.arity)

    def degree(self) -> int:
        return max((sum(sum(p) for p in key) for key, _ in self._terms), default=0)

    # --- arithmetic ---

    def _coerce(self, other) -> "SymPoly":
        if isinstance(other, type(self)):
            return other
        if isinstance(other, (int, LaurentPoly)):
            return self.scalar(Scalar.coerce(other))
        raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for key, c in other._terms:
            out[key] = out.get(key, Scalar.zero()) + c
        return type(self)(out)

    __radd__ = __add__

    def __neg__(self):
        return type(self)({k: -c for k, c in self._terms})

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, LaurentPoly)):
            c = Scalar.coerce(other)
            return type(self)({k: v * c for k, v in self._terms})
        if not isinstance(other, type(self)):
            return NotImplemented
        out: Dict[SymKey, Scalar] = {}
        for k1, c1 in self._terms:
            for k2, c2 in other._terms:
                key = tuple(merge_partitions(a, b) for a, b in zip(k1, k2))
                out[key] = out.get(key, Scalar.zero()) + c1 * c2
        return type(self)(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = self.one()
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, LaurentPoly)):
            other = self.scalar(Scalar.coerce(other))
        if not isinstance(other, SymPoly) or other.arity != self.arity:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.arity, self._terms))
        return self._hash

    def __repr__(self) -> str:
        return f"{type(self).__name__}({render_sym(self)!r})"

    def __str__(self) -> str:
        return render_sym(self)


class SymElt(SymPoly):
    """Element of Sym."""

    arity = 1
    __slots__ = ()


class SymSym(SymPoly):
    """Element of Sym⊗Sym: key (λ, μ) means (e_λ⊗1)(1⊗e_μ)."""

    arity = 2
    __slots__ = ()


class SymSym2(SymPoly):
    """Element of (Sym⊗Sym)⊗(Sym⊗Sym), the target of the center comultiplication."""

    arity = 4
    __slots__ = ()


def embed_slot(a: SymPoly, target: type, slot: int) -> SymPoly:
    """Place an element of Sym^{⊗r} into consecutive slots of a larger tensor power."""
    out: Dict[SymKey, Scalar] = {}
    for key, c in a.items():
        full = [()] * target.arity
        for i, p in enumerate(key):
            full[slot + i] = p
        out[tuple(full)] = c
    return target(out)


def render_sym(a: SymPoly) -> str:
    if a.is_zero():
        return "0"

    def factor(p: Partition) -> str:
        return "*".join(f"e{part}" for part in p) if p else "1"

    parts = []
    for key, c in a.items():
        parts.append(f"[{render_scalar(c)}] " + " ⊗ ".join(factor(p) for p in key))
    return " + ".join(parts)


# --- complete symmetric functions ---

_H_CACHE: Dict[int, SymElt] = {0: SymElt.one()}


def h_from_e(n: int) -> SymElt:
    """h_n in the e-basis from Σ_{r+s=n} (-1)^s e_r h_s = δ_{n,0}."""
    if n < 0:
        return SymElt.zero()
    for m in range(len(_H_CACHE), n + 1):
        total = SymElt.zero()
        for s in range(m):
            sign = -1 if (m - s - 1) % 2 else 1
            total = total + SymElt.e(m - s) * _H_CACHE[s] * sign
        _H_CACHE[m] = total
    return _H_CACHE[n]


def h_det_e(n: int) -> SymElt:
    """The determinant det(e_{i-j+1})_{i,j=1..n}, expanded with sympy."""
    if n == 0:
        return SymElt.one()
    symbols = sympy.symbols(f"e1:{n + 1}")

    def entry(i: int, j: int):
        d = i - j + 1
        if d < 0:
            return 0
        return 1 if d == 0 else symbols[d - 1]

    det = sympy.Matrix(n, n, lambda i, j: entry(i, j)).det(method="berkowitz")
    poly = sympy.Poly(sympy.expand(det), *symbols)
    out: Dict[SymKey, Scalar] = {}
    for monom, coeff in poly.terms():
        partition: List[int] = []
        for index, power in enumerate(monom):
            partition.extend([index + 1] * power)
        out[(tuple(sorted(partition, reverse=True)),)] = Scalar.constant(int(coeff))
    return SymElt(out)


def symid_residual(n: int) -> SymElt:
    """Σ_{r+s=n} (-1)^s e_r h_s - δ_{n,0}; zero for every n."""
    total = SymElt.zero()
    for s in range(n + 1):
        total = total + SymElt.e(n - s) * h_from_e(s) * (-1 if s % 2 else 1)
    return total - (1 if n == 0 else 0)


# --- bubble dictionary ---

def bubble_symsym(orientation: str, sign: str, label: int, k: int) -> SymSym:
    """
    Value of a (+) or (-) bubble with the given label in Heis_k, for any label.

    ccw(+, a) = t z^{-1} e_{a+k} ⊗ 1
    cw(+, a)  = (-1)^{a-k-1} t^{-1} z^{-1} h_{a-k} ⊗ 1
    ccw(-, a) = -t^{-1} z^{-1} 1 ⊗ e_{-a}
    cw(-, a)  = (-1)^a t z^{-1} 1 ⊗ h_{-a}
    """
    if orientation == CCW and sign == PLUS:
        return SymSym.e(label + k, 0) * zt(-1, 1)
    if orientation == CW and sign == PLUS:
        n = label - k
        return SymSym.h(n, 0) * zt(-1, -1, -1 if n % 2 == 0 else 1)
    if orientation == CCW and sign == MINUS:
        return SymSym.e(-label, 1) * zt(-1, -1, -1)
    if orientation == CW and sign == MINUS:
        return SymSym.h(-label, 1) * zt(-1, 1, 1 if label % 2 == 0 else -1)
    raise ParameterMismatch(f"unknown bubble {orientation}{sign}")


BETA_GENERATORS = ("h⊗1", "1⊗h", "e⊗1", "1⊗e")


def beta_dict(k: int, generator: str, n: int) -> Tuple[Scalar, str, str, int]:
    """
    (prefactor, orientation, sign, label) such that prefactor times that bubble
    is the β-image of the generator.
    """
    if n < 1:
        raise ParameterMismatch("beta_dict needs n >= 1")
    if generator == "h⊗1":
        return zt(1, 1, 1 if n % 2 else -1), CW, PLUS, n + k
    if generator == "1⊗h":
        return zt(1, -1, -1 if n % 2 else 1), CW, MINUS, -n
    if generator == "e⊗1":
        return zt(1, -1), CCW, PLUS, n - k
    if generator == "1⊗e":
        return zt(1, 1, -1), CCW, MINUS, -n
    raise ParameterMismatch(f"unknown generator {generator!r}")


def generator_symsym(generator: str, n: int) -> SymSym:
    slot = 0 if generator.endswith("⊗1") else 1
    if generator.replace("⊗1", "").replace("1⊗", "") == "h":
        return SymSym.h(n, slot)
    return SymSym.e(n, slot)


# --- generating series ---

class BubbleSeries:
    """
    Truncated bubble generating series: coefficient of w^{-n} for n in a window.

    (+) series are expansions at w = ∞: n_min is the exact leading index and
    the series continues towards larger n. (-) series are expansions at w = 0:
    n_max is the exact leading index and the series continues towards smaller n.
    """

    def __init__(self, sign: str, coeffs: Mapping[int, SymPoly], n_min: int, n_max: int,
                 orientation: Optional[str] = None, kind: type = SymSym):
        if n_min > n_max:
            raise WindowMismatch(f"empty window [{n_min}, {n_max}]")
        self.sign = sign
        self.orientation = orientation
        self.kind = kind
        self.n_min = n_min
        self.n_max = n_max
        self.coeffs: Dict[int, SymPoly] = {
            n: c for n, c in coeffs.items() if n_min <= n <= n_max and not c.is_zero()
        }

    @property
    def order(self) -> int:
        return self.n_max - self.n_min

    @property
    def leading(self) -> int:
        return self.n_min if self.sign == PLUS else self.n_max

    def coefficient(self, n: int) -> SymPoly:
        if not self.n_min <= n <= self.n_max:
            raise WindowMismatch(f"w^{-n} lies outside the window [{self.n_min}, {self.n_max}]")
        return self.coeffs.get(n, self.kind.zero())

    def is_one(self) -> bool:
        return all(
            self.coefficient(n) == (self.kind.one() if n == 0 else self.kind.zero())
            for n in range(self.n_min, self.n_max + 1)
        )

    @classmethod
    def one(cls, sign: str, order: int, kind: type = SymSym) -> "BubbleSeries":
        window = (0, order) if sign == PLUS else (-order, 0)
        return cls(sign, {0: kind.one()}, *window, kind=kind)

    def __repr__(self) -> str:
        name = f"{self.orientation or ''}{self.sign}"
        return f"BubbleSeries({name}, window=[{self.n_min}, {self.n_max}])"


def bubble_series(k: int, orientation: str, sign: str, order: int) -> BubbleSeries:
    """One of ⟲₊, ⟳₊, ⟲₋, ⟳₋ with `order` + 1 coefficients from the leading one."""
    if sign == PLUS:
        prefactor = zt(1, -1) if orientation == CCW else zt(1, 1, -1)
        start = -k if orientation == CCW else k
        window = (start, start + order)
    else:
        prefactor = zt(1, 1, -1) if orientation == CCW else zt(1, -1)
        window = (-order, 0)
    coeffs = {
        n: bubble_symsym(orientation, sign, n, k) * prefactor
        for n in range(window[0], window[1] + 1)
    }
    return BubbleSeries(sign, coeffs, *window, orientation=orientation)


def series_mul_truncated(a: BubbleSeries, b: BubbleSeries, order: int) -> BubbleSeries:
    """Cauchy product keeping `order` + 1 coefficients from the leading term."""
    if a.sign != b.sign or a.kind is not b.kind:
        raise WindowMismatch("series expand in different directions")
    if order > min(a.order, b.order):
        raise WindowMismatch(f"order {order} exceeds the known windows ({a.order}, {b.order})")
    lead = a.leading + b.leading
    window = (lead, lead + order) if a.sign == PLUS else (lead - order, lead)
    coeffs: Dict[int, SymPoly] = {}
    for n in range(window[0], window[1] + 1):
        total = a.kind.zero()
        for i, ci in a.coeffs.items():
            cj = b.coeffs.get(n - i)
            if cj is not None:
                total = total + ci * cj
        coeffs[n] = total
    return BubbleSeries(a.sign, coeffs, *window, kind=a.kind)


def comult_center(l: int, m: int, orientation: str, sign: str, order: int) -> BubbleSeries:
    """
    Center-level image of a bubble series under Δ_{l|m}: the product of the
    blue series of Heis_l (slots 0, 1) and the red series of Heis_m (slots 2, 3).
    """
    blue = bubble_series(l, orientation, sign, order)
    red = bubble_series(m, orientation, sign, order)
    blue4 = BubbleSeries(
        sign, {n: embed_slot(c, SymSym2, 0) for n, c in blue.coeffs.items()},
        blue.n_min, blue.n_max, orientation=orientation, kind=SymSym2,
    )
    red4 = BubbleSeries(
        sign, {n: embed_slot(c, SymSym2, 2) for n, c in red.coeffs.items()},
        red.n_min, red.n_max, orientation=orientation, kind=SymSym2,
    )
    product = series_mul_truncated(blue4, red4, order)
    product.orientation = orientation
    return product


def comult_generator(l: int, m: int, generator: str, n: int) -> SymSym2:
    """Δ_{l|m}(e_n ⊗ 1) etc., read off the coefficients of the product series."""
    k = l + m
    if generator == "e⊗1":
        series = comult_center(l, m, CCW, PLUS, n)
        return series.coefficient(n - k)
    if generator == "1⊗e":
        series = comult_center(l, m, CCW, MINUS, n)
        return series.coefficient(-n)
    if generator == "h⊗1":
        series = comult_center(l, m, CW, PLUS, n)
        return series.coefficient(n + k) * (-1 if n % 2 else 1)
    if generator == "1⊗h":
        series = comult_center(l, m, CW, MINUS, n)
        return series.coefficient(-n) * (-1 if n % 2 else 1)
    raise ParameterMismatch(f"unknown generator {generator!r}")


def comult_apply(a: SymSym, l: int, m: int) -> SymSym2:
    """Extend Δ_{l|m} multiplicatively from the e-generators to all of Sym⊗Sym."""
    total = SymSym2.zero()
    for (lam, mu), c in a.items():
        term = SymSym2.one() * c
        for part in lam:
            term = term * comult_generator(l, m, "e⊗1", part)
        for part in mu:
            term = term * comult_generator(l, m, "1⊗e", part)
        total = total + term
    return total


# --- modified complete symmetric polynomials ---

class QZScalar(LaurentPoly):
    """Element of Z[q^{±1}, z^{±1}]; z is later specialised to q - q^{-1}."""

    variables = ("q", "z")
    __slots__ = ()


XPoly = Dict[Tuple[int, ...], QZScalar]


def _xpoly_add(a: XPoly, b: XPoly, scale: Optional[QZScalar] = None) -> XPoly:
    out = dict(a)
    for exp, c in b.items():
        value = out.get(exp, QZScalar.zero()) + (c * scale if scale is not None else c)
        if value.is_zero():
            out.pop(exp, None)
        else:
            out[exp] = value
    return out


def _xpoly_shift(a: XPoly, n_vars: int, var: int, power: int) -> XPoly:
    out: XPoly = {}
    for exp, c in a.items():
        padded = list(exp) + [0] * (n_vars - len(exp))
        padded[var] += power
        out[tuple(padded)] = c
    return out


def _pad(a: XPoly, n_vars: int) -> XPoly:
    return {tuple(list(e) + [0] * (n_vars - len(e))): c for e, c in a.items()}


def htilde(m: int, n_vars: int) -> XPoly:
    """h̃_m(x_1..x_n) = Σ_{i_1≤..≤i_m} (q^{-1}z)^{#distinct-1} x_{i_1}..x_{i_m}."""
    if m < 0 or n_vars < 0:
        raise ParameterMismatch("htilde needs m, n_vars >= 0")
    if m == 0:
        return {(0,) * n_vars: QZScalar.monomial(1, -1)}
    out: XPoly = {}
    for combo in itertools.combinations_with_replacement(range(n_vars), m):
        exp = [0] * n_vars
        for i in combo:
            exp[i] += 1
        distinct = len(set(combo))
        coeff = QZScalar.monomial(-(distinct - 1), distinct - 1)
        out = _xpoly_add(out, {tuple(exp): coeff})
    return out


def htilde_recurrence_rhs(m: int, n_vars: int) -> XPoly:
    """h̃_m(x_1..x_{n-1}) + q^{-1}z Σ_{r=1..m} h̃_{m-r}(x_1..x_{n-1}) x_n^r."""
    out = _pad(htilde(m, n_vars - 1), n_vars)
    for r in range(1, m + 1):
        shifted = _xpoly_shift(htilde(m - r, n_vars - 1), n_vars, n_vars - 1, r)
        out = _xpoly_add(out, shifted, QZScalar.monomial(-1, 1))
    return out


def dorking_residual(m: int, n_vars: int) -> XPoly:
    """
    z·(h̃_m(x..x_n) - h̃_m(x..x_{n-1}) - h̃_{m-1}(x..x_n) x_n + q^{-2} h̃_{m-1}(x..x_{n-1}) x_n)
    with z then specialised to q - q^{-1}; zero for m, n ≥ 1.
    """
    last = n_vars - 1
    terms = htilde(m, n_vars)
    terms = _xpoly_add(terms, _pad(htilde(m, n_vars - 1), n_vars), QZScalar.constant(-1))
    terms = _xpoly_add(terms, _xpoly_shift(htilde(m - 1, n_vars), n_vars, last, 1), QZScalar.constant(-1))
    terms = _xpoly_add(
        terms, _xpoly_shift(htilde(m - 1, n_vars - 1), n_vars, last, 1), QZScalar.monomial(-2, 0)
    )
    return {exp: c for exp, c in ((e, z_to_q(c.shift(0, 1))) for e, c in terms.items()) if not c.is_zero()}


def z_to_q(a: QZScalar) -> QZScalar:
    """Substitute z = q - q^{-1}; negative powers of z are not allowed."""
    zq = QZScalar({(1, 0): 1, (-1, 0): -1})
    out = QZScalar.zero()
    for (qa, za), c in a.items():
        if za < 0:
            raise ParameterMismatch("cannot substitute into negative powers of z")
        out = out + (zq ** za).shift(qa, 0) * c
    return out


def evaluate_xpoly(a: XPoly, xs: Iterable, q) -> Fraction:
    """Evaluate at rational q (z = q - q^{-1}) and rational x values."""
    q = Fraction(q)
    xs = [Fraction(x) for x in xs]
    point = {"q": q, "z": q - 1 / q}
    total = Fraction(0)
    for exp, c in a.items():
        term = specialize(c, point)
        for x, e in zip(xs, exp):
            term *= x ** e
        total += term
    return total


# --- β injectivity ---

def bubble_monomials(max_degree: int, family: str) -> List[Tuple[Tuple[str, str, int], ...]]:
    """
    Monomials in the (+)/(-) bubbles of one orientation family ("ccw" or "cw")
    whose symmetric-function degree is at most max_degree, as tuples of
    (orientation, sign, degree) factors.
    """
    orientation = CCW if family == CCW else CW
    gens = [(orientation, s, d) for s in SIGNS for d in range(1, max_degree + 1)]
    monomials: List[Tuple[Tuple[str, str, int], ...]] = [()]
    for size in range(1, max_degree + 1):
        for combo in itertools.combinations_with_replacement(gens, size):
            if sum(d for _, _, d in combo) <= max_degree:
                monomials.append(combo)
    return monomials


def beta_image_rank(max_degree: int, family: str, k: int = 0) -> Tuple[int, int]:
    """(number of monomials, rank of their SymSym images) for one family."""
    images = []
    for monomial in bubble_monomials(max_degree, family):
        value = SymSym.one()
        for orientation, sign, degree in monomial:
            if sign == PLUS:
                label = degree - k if orientation == CCW else degree + k
            else:
                label = -degree
            value = value * bubble_symsym(orientation, sign, label, k)
        images.append(value)
    keys = sorted({key for img in images for key, _ in img.items()})
    point = {"z": 3, "t": 5}

    def entry(i: int, j: int) -> sympy.Rational:
        value = specialize(images[i].coefficient(keys[j]), point)
        return sympy.Rational(value.numerator, value.denominator)

    matrix = sympy.Matrix(len(images), len(keys), entry)
    rank = matrix.rank() if keys else 0
    logger.debug("beta rank %s/%s for %s", rank, len(images), family)
    return len(images), rank
