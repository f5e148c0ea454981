"""
Action: Heis_{-l}(z,t) and Heis_l(z,t^{-1}) acting on modules over cyclotomic Hecke algebras.

An object word is evaluated letter by letter from the right on the regular
module H_n^f. Every module is a concrete vector space over the rationals
(z and t are specialised) with an explicit basis:
- induction H_{m+1} ⊗_{H_m} N uses the free right basis τ_j..τ_m x_{m+1}^a
- coinduction Hom_{H_m}(H_{m+1}, N) uses the free left basis x_{m+1}^a τ_m..τ_j
- restriction keeps the basis of the module it restricts
Natural transformations become block matrices; a transformation living in
the middle of a word is lifted through the outer letters block-diagonally.
"""

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import sympy

from cache_manager import cache_manager
from diagrams import (
    ARITY, DOWN, EMPTY, UP,
    Diagram, Gen, Morphism, ObjectWord, Slice, compose, render, tensor, word_of,
)
from error_handler import HeisError, NotAScalar, ParameterMismatch, TypeMismatch
from hecke import (
    CyclotomicPoly,
    HeckeElement,
    Key,
    ak_basis,
    ah_mul,
    cyclotomic_reduce,
    embed,
    hecke_mul,
    hecke_render,
    reduced_word,
    right_coset_basis,
    trace,
)
from heis_defaults import GENERIC_T, GENERIC_Z
from relations import SUITES, relations_in
from rewrite import embed as embed_normal_form, normalize, random_morphism
from scalars import T, Scalar, coerce_scalar, invert_unit, render_scalar, specialize, zt
from symfunc import CCW, CW, MINUS, PLAIN, PLUS

logger = logging.getLogger("heiscat.action")

Matrix = sympy.Matrix


def _rational(value: Fraction) -> sympy.Rational:
    return sympy.Rational(value.numerator, value.denominator)


def _rational_sqrt(value: Fraction) -> Fraction:
    root = sympy.sqrt(_rational(value))
    if not root.is_Rational:
        raise ParameterMismatch(f"{value} has no rational square root; pass t explicitly")
    return Fraction(int(root.p), int(root.q))


# --- specialisation context ---

class ActionContext:
    """
    One tower H_0^f ⊂ H_1^f ⊂ ... specialised at a rational point.
    `parameter` is the t with t^2 = f_l; it defaults to the point's t when that works.
    """

    def __init__(
        self,
        f: CyclotomicPoly,
        point: Optional[Mapping[str, Fraction]] = None,
        parameter: Optional[Fraction] = None,
    ):
        self.f = f
        self.l = f.l
        self.point: Dict[str, Fraction] = {"z": Fraction(GENERIC_Z), "t": Fraction(GENERIC_T)}
        self.point.update({name: Fraction(v) for name, v in (point or {}).items()})
        self.z = self.point["z"]
        last = specialize(f.coeffs[-1], self.point)
        if parameter is None:
            t = self.point["t"]
            parameter = t if t * t == last else _rational_sqrt(last)
        parameter = Fraction(parameter)
        if parameter * parameter != last:
            raise ParameterMismatch(f"t = {parameter} does not satisfy t^2 = f_l = {last}")
        self.t = parameter
        self.key = (f, tuple(sorted(self.point.items())), parameter)

    def __repr__(self) -> str:
        return f"ActionContext({self.f!r}, z={self.z}, t={self.t})"

    # --- elements ---

    def value(self, c: Scalar) -> sympy.Rational:
        return _rational(specialize(c, self.point))

    def basis(self, n: int) -> List[Key]:
        return ak_basis(n, self.l)

    def reduce(self, a: HeckeElement) -> HeckeElement:
        return cyclotomic_reduce(a, self.f)

    def mul(self, a: HeckeElement, b: HeckeElement) -> HeckeElement:
        return hecke_mul(a, self.reduce(b), self.f)

    def coords(self, a) -> Matrix:
        if isinstance(a, RationalElement):
            return Matrix([a.terms.get(key, 0) for key in self.basis(a.n)])
        reduced = self.reduce(a)
        return Matrix([self.value(reduced.coefficient(*key)) for key in self.basis(a.n)])

    @staticmethod
    def element(key: Key, n: int) -> HeckeElement:
        return HeckeElement(n, {key: Scalar.one()})

    def x_power(self, i: int, n: int, power: int) -> HeckeElement:
        return self.reduce(HeckeElement.x(i, n, power))

    def trace(self, a: HeckeElement) -> HeckeElement:
        return trace(a, self.f)

    # --- free bases over the next algebra down ---

    def right_cosets(self, m: int) -> List[HeckeElement]:
        """H_m^f = ⊕ c H_{m-1}^f over c = τ_j..τ_{m-1} x_m^a."""
        return cache_manager.get_or_compute(
            "action", ("right", m) + self.key,
            lambda: [self.reduce(c) for c in right_coset_basis(m, self.l)],
        )

    def left_cosets(self, m: int) -> List[HeckeElement]:
        """H_m^f = ⊕ H_{m-1}^f b over b = x_m^a τ_{m-1}..τ_j."""

        def compute() -> List[HeckeElement]:
            out = []
            for j in range(1, m + 1):
                word = list(range(m - 1, j - 1, -1))
                for a in range(self.l):
                    out.append(self.reduce(ah_mul(HeckeElement.x(m, m, a), HeckeElement.tau_word(word, m))))
            return out

        return cache_manager.get_or_compute("action", ("left", m) + self.key, compute)

    @staticmethod
    def identity_index(cosets: Sequence[HeckeElement]) -> int:
        for i, c in enumerate(cosets):
            if c == HeckeElement.one(c.n):
                return i
        raise ParameterMismatch("coset basis does not contain 1")

    def _solver(self, side: str, m: int) -> Matrix:
        """Inverse of the matrix sending coset coordinates to Ariki–Koike coordinates."""

        def compute() -> Matrix:
            below = [self.element(key, m - 1) for key in self.basis(m - 1)]
            columns = []
            if side == "right":
                for c in self.right_cosets(m):
                    columns.extend(self.coords(self.mul(c, embed(h))) for h in below)
            else:
                for b in self.left_cosets(m):
                    columns.extend(self.coords(self.mul(embed(h), b)) for h in below)
            square = Matrix.hstack(*columns)
            if square.det() == 0:
                raise ParameterMismatch(f"H_{m}^f is not free over H_{m - 1}^f at {self.point}")
            logger.debug("%s coset solver for m=%d has size %d", side, m, square.rows)
            return square.inv()

        return cache_manager.get_or_compute("action", ("solver", side, m) + self.key, compute)

    def decompose(self, side: str, a: HeckeElement) -> List[Matrix]:
        """
        Coordinates (over H_{m-1}^f) of a ∈ H_m^f along the right or left coset basis.
        Right: a = Σ c·h_c; left: a = Σ h_b·b. Each h is returned as a coordinate column.
        """
        m = a.n
        solution = self._solver(side, m) * self.coords(a)
        return _split(solution, len(self.basis(m - 1)))

    def trace_duals(self, m: int) -> List["RationalElement"]:
        """b_i° ∈ H_m^f with tr(b_i° b_j) = δ_ij for the right coset basis b_j."""

        def compute() -> List["RationalElement"]:
            basis = self.basis(m)
            cosets = self.right_cosets(m)
            rows = []
            for b in cosets:
                images = [self.coords(self.trace(self.mul(self.element(key, m), b))) for key in basis]
                rows.append(Matrix.hstack(*images))
            system = Matrix.vstack(*rows)
            if system.det() == 0:
                raise ParameterMismatch(f"the trace form on H_{m}^f is degenerate at {self.point}")
            inverse = system.inv()
            width = len(self.basis(m - 1))
            unit = self.basis(m - 1).index(((0,) * (m - 1), tuple(range(m - 1))))
            duals = []
            for i in range(len(cosets)):
                column = inverse[:, i * width + unit]
                duals.append(self._from_coords(column, m))
            return duals

        return cache_manager.get_or_compute("action", ("duals", m) + self.key, compute)

    def _from_coords(self, column: Matrix, n: int) -> "RationalElement":
        return RationalElement(n, {key: column[i] for i, key in enumerate(self.basis(n)) if column[i] != 0})


@dataclass
class RationalElement:
    """An element of H_n^f with specialised coefficients; only ever acted with."""
    n: int
    terms: Mapping[Key, sympy.Rational] = field(default_factory=dict)


# --- modules ---

class HeckeModule:
    """A finite-dimensional H_level^f-module with a fixed ordered basis."""

    kind = "regular"

    def __init__(self, context: ActionContext, level: int, labels: List[Tuple[str, ...]]):
        self.context = context
        self.level = level
        self.labels = labels
        self._actions: Dict[Key, Matrix] = {}

    @property
    def dim(self) -> int:
        return len(self.labels)

    def basis_action(self, key: Key) -> Matrix:
        if key not in self._actions:
            self._actions[key] = self._basis_action(key)
        return self._actions[key]

    def _basis_action(self, key: Key) -> Matrix:
        raise NotImplementedError

    def act(self, a) -> Matrix:
        """Matrix of a HeckeElement or RationalElement of H_level^f."""
        total = sympy.zeros(self.dim, self.dim)
        if isinstance(a, RationalElement):
            for key, c in a.terms.items():
                total += c * self.basis_action(key)
            return total
        for key, c in self.context.reduce(a).items():
            total += self.context.value(c) * self.basis_action(key)
        return total

    def act_coords(self, column: Matrix) -> Matrix:
        total = sympy.zeros(self.dim, self.dim)
        for i, key in enumerate(self.context.basis(self.level)):
            if column[i] != 0:
                total += column[i] * self.basis_action(key)
        return total


class RegularModule(HeckeModule):
    def __init__(self, context: ActionContext, n: int):
        labels = [(hecke_render(context.element(key, n)),) for key in context.basis(n)]
        super().__init__(context, n, labels)

    def _basis_action(self, key: Key) -> Matrix:
        ctx = self.context
        left = ctx.element(key, self.level)
        columns = [ctx.coords(ctx.mul(left, ctx.element(b, self.level))) for b in ctx.basis(self.level)]
        return Matrix.hstack(*columns)


class ZeroModule(HeckeModule):
    kind = "zero"

    def __init__(self, context: ActionContext, level: int):
        super().__init__(context, level, [])

    def _basis_action(self, key: Key) -> Matrix:
        return sympy.zeros(0, 0)


class RestrictedModule(HeckeModule):
    kind = "res"

    def __init__(self, inner: HeckeModule):
        super().__init__(inner.context, inner.level - 1, inner.labels)
        self.inner = inner

    def _basis_action(self, key: Key) -> Matrix:
        return self.inner.act(embed(self.context.element(key, self.level)))


class InducedModule(HeckeModule):
    """H_{m+1}^f ⊗_{H_m^f} N; basis c ⊗ v, c-major."""

    kind = "ind"

    def __init__(self, inner: HeckeModule):
        ctx = inner.context
        self.inner = inner
        self.cosets = ctx.right_cosets(inner.level + 1)
        labels = [(hecke_render(c),) + v for c in self.cosets for v in inner.labels]
        super().__init__(ctx, inner.level + 1, labels)

    def _basis_action(self, key: Key) -> Matrix:
        ctx = self.context
        left = ctx.element(key, self.level)
        blocks = []
        for c in self.cosets:
            parts = ctx.decompose("right", ctx.mul(left, c))
            blocks.append([self.inner.act_coords(part) for part in parts])
        # blocks[c][c'] is the (c', c) block
        return Matrix.vstack(*[
            Matrix.hstack(*[blocks[col][row] for col in range(len(self.cosets))])
            for row in range(len(self.cosets))
        ])

    def unit_index(self, j: int) -> int:
        return ActionContext.identity_index(self.cosets) * self.inner.dim + j


class CoinducedModule(HeckeModule):
    """Hom_{H_m^f}(H_{m+1}^f, N); θ is stored as its values θ(b) on the left basis, b-major."""

    kind = "coind"

    def __init__(self, inner: HeckeModule):
        ctx = inner.context
        self.inner = inner
        self.cosets = ctx.left_cosets(inner.level + 1)
        labels = [(f"θ({hecke_render(b)})",) + v for b in self.cosets for v in inner.labels]
        super().__init__(ctx, inner.level + 1, labels)

    def _basis_action(self, key: Key) -> Matrix:
        # (hθ)(b) = θ(b h)
        ctx = self.context
        right = ctx.element(key, self.level)
        rows = []
        for b in self.cosets:
            parts = ctx.decompose("left", ctx.mul(b, right))
            rows.append(Matrix.hstack(*[self.inner.act_coords(part) for part in parts]))
        return Matrix.vstack(*rows)

    def evaluation(self, a) -> Matrix:
        """The map θ ↦ θ(a) into the inner module, for a ∈ H_{m+1}^f."""
        parts = self.context.decompose("left", a)
        return Matrix.hstack(*[self.inner.act_coords(part) for part in parts])

    def unit_block(self) -> int:
        return ActionContext.identity_index(self.cosets)


def _split(column: Matrix, width: int) -> List[Matrix]:
    return [column[i * width:(i + 1) * width, :] for i in range(column.rows // width)]


# --- descriptors ---

@dataclass
class ModuleDescriptor:
    """Ψ(word) applied to the regular module H_n^f."""
    word: ObjectWord
    base_level: int
    level: int
    labels: List[Tuple[str, ...]]
    rank: int

    @property
    def dim(self) -> int:
        return len(self.labels)

    def to_dict(self) -> Dict:
        return {
            "word": str(self.word),
            "base_level": self.base_level,
            "level": self.level,
            "dim": self.dim,
            "rank": self.rank,
            "basis": [" ⊗ ".join(label) for label in self.labels],
        }


@dataclass
class ActionMatrix:
    """A natural transformation evaluated on H_n^f, over the specialised field."""
    domain: ModuleDescriptor
    codomain: ModuleDescriptor
    entries: Matrix

    def __post_init__(self):
        if self.entries.shape != (self.codomain.dim, self.domain.dim):
            raise TypeMismatch(
                f"matrix of shape {self.entries.shape} between modules of dims "
                f"{self.domain.dim} and {self.codomain.dim}",
                expected=(self.codomain.dim, self.domain.dim), found=self.entries.shape,
            )

    @property
    def shape(self) -> Tuple[int, int]:
        return self.entries.shape

    def is_zero(self) -> bool:
        return all(e == 0 for e in self.entries)

    def is_invertible(self) -> bool:
        return self.entries.rows == self.entries.cols and self.entries.det() != 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, ActionMatrix):
            return NotImplemented
        return (self.domain.word, self.codomain.word) == (other.domain.word, other.codomain.word) \
            and self.entries == other.entries

    def __add__(self, other: "ActionMatrix") -> "ActionMatrix":
        return ActionMatrix(self.domain, self.codomain, self.entries + other.entries)

    def __sub__(self, other: "ActionMatrix") -> "ActionMatrix":
        return ActionMatrix(self.domain, self.codomain, self.entries - other.entries)

    def __matmul__(self, other: "ActionMatrix") -> "ActionMatrix":
        """self ∘ other."""
        return ActionMatrix(other.domain, self.codomain, self.entries * other.entries)

    def scalar(self) -> Fraction:
        """The value of an endomorphism of a one-dimensional module."""
        if self.entries.shape != (1, 1):
            raise NotAScalar(f"a {self.entries.shape} matrix is not a scalar")
        value = self.entries[0, 0]
        return Fraction(int(value.p), int(value.q))

    def render(self) -> str:
        rows = [[str(e) for e in self.entries.row(i)] for i in range(self.entries.rows)]
        if not rows:
            return f"0 ({self.entries.rows}×{self.entries.cols})"
        width = max(len(cell) for row in rows for cell in row)
        return "\n".join("[ " + "  ".join(cell.rjust(width) for cell in row) + " ]" for row in rows)

    def to_dict(self) -> Dict:
        return {
            "domain": self.domain.to_dict(),
            "codomain": self.codomain.to_dict(),
            "entries": [[str(e) for e in self.entries.row(i)] for i in range(self.entries.rows)],
        }


# --- the two actions ---

class HeisenbergAction:
    """
    Ψ_f: Heis_{-l}(z,t) → End(⊕ H_n^f-mod); ↑ induces, ↓ restricts.
    Cups and caps are the units and counits of (ind, res) and, through the
    trace -t^{-1}z^{-1} tr, of (res, ind).
    """

    name = "psi"
    raising = UP

    def __init__(self, context: ActionContext):
        self.context = context
        self.k = self.level_of(context)
        self.t = _rational(self.parameter)
        self.z = _rational(context.z)
        self._modules: Dict[Tuple[ObjectWord, int], HeckeModule] = {}
        self._slices: Dict[Tuple[Slice, int], Matrix] = {}
        self._handlers = {
            Gen.DOT_UP: self._dot,
            Gen.CROSS_POS: self._cross,
            Gen.CUP_RIGHT: self._cup_right,
            Gen.CAP_RIGHT: self._cap_right,
            Gen.CUP_LEFT: self._cup_left,
            Gen.CAP_LEFT: self._cap_left,
        }

    # --- objects ---

    def module(self, word, n: int) -> HeckeModule:
        word = word_of(word)
        key = (word, n)
        if key not in self._modules:
            if not word:
                self._modules[key] = RegularModule(self.context, n)
            else:
                self._modules[key] = self._apply(word[0], self.module(word[1:], n))
        return self._modules[key]

    def _apply(self, letter: str, inner: HeckeModule) -> HeckeModule:
        step = 1 if letter == self.raising else -1
        if inner.kind == "zero" or inner.level + step < 0:
            return ZeroModule(self.context, inner.level + step)
        if step < 0:
            return RestrictedModule(inner)
        return self._raise(inner)

    def _raise(self, inner: HeckeModule) -> HeckeModule:
        return InducedModule(inner)

    def descriptor(self, word, n: int) -> ModuleDescriptor:
        word = word_of(word)
        m = self.module(word, n)
        return ModuleDescriptor(word, n, m.level, m.labels, m.dim // len(self.context.basis(n)))

    # --- morphisms ---

    @staticmethod
    def level_of(context: ActionContext) -> int:
        return -context.l

    @property
    def parameter(self) -> Fraction:
        """The t of the category being represented."""
        return self.context.t

    def coefficient(self, c: Scalar, twisted: bool = False) -> sympy.Rational:
        t = 1 / self.parameter if twisted else self.parameter
        return _rational(specialize(c, {"z": self.context.z, "t": t}))

    def morphism(self, f: Morphism, n: int) -> ActionMatrix:
        domain = self.descriptor(f.source, n)
        codomain = self.descriptor(f.target, n)
        total = sympy.zeros(codomain.dim, domain.dim)
        for d, c in f.items():
            total += self.coefficient(c, f.twisted) * self.diagram(d, n)
        return ActionMatrix(domain, codomain, total)

    def diagram(self, d: Diagram, n: int) -> Matrix:
        total = sympy.eye(self.module(d.source, n).dim)
        for s in d.slices:
            total = self.slice(s, n) * total
        return total

    def slice(self, s: Slice, n: int) -> Matrix:
        key = (s, n)
        if key not in self._slices:
            self._slices[key] = self._slice(s, n)
        return self._slices[key]

    def _slice(self, s: Slice, n: int) -> Matrix:
        dom = self.module(s.context, n)
        cod = self.module(s.output, n)
        if dom.dim == 0 or cod.dim == 0:
            return sympy.zeros(cod.dim, dom.dim)
        if s.kind == Gen.DOT_DOWN:
            p = s.position
            steps = [(Gen.CUP_RIGHT, p), (Gen.DOT_UP, p + 1, s.label), (Gen.CAP_RIGHT, p + 1)]
            return self.diagram(Diagram.build(s.context, steps), n)
        needed, produced = ARITY[s.kind]
        inner_word = s.context[s.position + len(needed):]
        inner = self.module(inner_word, n)
        if s.kind == Gen.BUBBLE:
            local = self.bubble(s.orientation, s.sign, s.label, inner_word, n)
        elif s.kind == Gen.CROSS_NEG:
            local = self._local(Gen.CROSS_POS, s.label, inner_word, needed, produced, n)
            local -= self.z * sympy.eye(local.rows)
        else:
            local = self._local(s.kind, s.label, inner_word, needed, produced, n)
        level = inner.level + sum(1 if x == self.raising else -1 for x in needed)
        for letter in reversed(s.context[:s.position]):
            local = self._lift(letter, level, local)
            level += 1 if letter == self.raising else -1
        return local

    def _local(self, kind: Gen, label: int, inner_word: ObjectWord, needed, produced, n: int) -> Matrix:
        inner = self.module(inner_word, n)
        dom = self.module(needed + inner_word, n)
        cod = self.module(produced + inner_word, n)
        return self._handlers[kind](label, inner, dom, cod)

    def _lift(self, letter: str, level: int, local: Matrix) -> Matrix:
        """Apply the functor of an outer letter to a map between modules of the given level."""
        if letter != self.raising:
            return local
        copies = self.context.l * (level + 1)
        return sympy.diag(*([local] * copies))

    # --- generators ---

    def _dot(self, label: int, inner: HeckeModule, dom: InducedModule, cod: InducedModule) -> Matrix:
        ctx = self.context
        y = ctx.x_power(dom.level, dom.level, label)
        columns = []
        for c in dom.cosets:
            image = dom.act(ctx.mul(c, y))
            columns.extend(image[:, dom.unit_index(j)] for j in range(inner.dim))
        return Matrix.hstack(*columns)

    def _cross(self, label: int, inner: HeckeModule, dom: InducedModule, cod: InducedModule) -> Matrix:
        ctx = self.context
        top = dom.level
        tau = HeckeElement.tau(top - 1, top)
        mid: InducedModule = dom.inner
        unit_top = ActionContext.identity_index(dom.cosets)
        columns = []
        for c2 in dom.cosets:
            for c1 in mid.cosets:
                image = dom.act(ctx.mul(ctx.mul(c2, embed(c1)), tau))
                for j in range(inner.dim):
                    columns.append(image[:, unit_top * mid.dim + mid.unit_index(j)])
        return Matrix.hstack(*columns)

    def _cup_right(self, label: int, inner: HeckeModule, dom: HeckeModule, cod: RestrictedModule) -> Matrix:
        induced: InducedModule = cod.inner
        out = sympy.zeros(cod.dim, dom.dim)
        for j in range(dom.dim):
            out[induced.unit_index(j), j] = 1
        return out

    def _cap_right(self, label: int, inner: HeckeModule, dom: InducedModule, cod: HeckeModule) -> Matrix:
        return Matrix.hstack(*[inner.act(c) for c in dom.cosets])

    def _cap_left(self, label: int, inner: HeckeModule, dom: RestrictedModule, cod: HeckeModule) -> Matrix:
        scale = -1 / (self.t * self.z)
        induced: InducedModule = dom.inner
        return Matrix.hstack(*[scale * inner.act(self.context.trace(c)) for c in induced.cosets])

    def _cup_left(self, label: int, inner: HeckeModule, dom: HeckeModule, cod: InducedModule) -> Matrix:
        scale = -self.t * self.z
        duals = self.context.trace_duals(inner.level)
        return Matrix.vstack(*[scale * inner.act(dual) for dual in duals])

    # --- bubbles ---

    def loop(self, orientation: str, dots: int, word, n: int) -> Matrix:
        """A genuine dotted circle in the leftmost region of `word`."""
        word = word_of(word)
        if orientation == CCW:
            steps = [(Gen.CUP_RIGHT, 0), (Gen.DOT_UP, 1, dots), (Gen.CAP_LEFT, 0)]
        else:
            steps = [(Gen.CUP_LEFT, 0), (Gen.DOT_UP, 0, dots), (Gen.CAP_RIGHT, 0)]
        return self.diagram(Diagram.build(word, steps), n)

    def bubble(self, orientation: str, sign: str, label: int, word, n: int) -> Matrix:
        plain = self.loop(orientation, label, word, n)
        if sign not in (PLUS, MINUS):
            return plain
        plus = self._plus_bubble(orientation, label, word, n)
        return plus if sign == PLUS else plain - plus

    def _plus_bubble(self, orientation: str, label: int, word, n: int) -> Matrix:
        if label > 0:
            return self.loop(orientation, label, word, n)
        size = self.module(word, n).dim
        t, z, k = self.t, self.z, self.k
        if orientation == CCW:
            if label == -k:
                return (t / z) * sympy.eye(size)
            if label < -k:
                return sympy.zeros(size, size)
            return (t / z) * self._inverse_series(CCW, label + k, word, n)
        if label == k:
            return -1 / (t * z) * sympy.eye(size)
        if label < k:
            return sympy.zeros(size, size)
        return -1 / (t * z) * self._inverse_series(CW, label - k, word, n)

    def _inverse_series(self, orientation: str, degree: int, word, n: int) -> Matrix:
        """
        Coefficient `degree` of the normalised (+) series of the given orientation,
        read off from the inverse of the other orientation's series.
        """
        t, z, k = self.t, self.z, self.k
        size = self.module(word, n).dim
        if orientation == CCW:
            known = [-t * z * self.loop(CW, k + i, word, n) for i in range(1, degree + 1)]
        else:
            known = [(z / t) * self.loop(CCW, -k + i, word, n) for i in range(1, degree + 1)]
        series = [sympy.eye(size)]
        for j in range(1, degree + 1):
            total = sympy.zeros(size, size)
            for i in range(1, j + 1):
                total -= known[i - 1] * series[j - i]
            series.append(total)
        return series[degree]


class DualHeisenbergAction(HeisenbergAction):
    """
    Ψ^∨_f: Heis_l(z,t^{-1}) → End(⊕ H_n^f-mod); ↑ restricts, ↓ coinduces.
    The leftward cup and cap come from the trace form identifying coinduction
    with induction, normalised by t^{-1}z^{-1} and tz.
    """

    name = "psi-dual"
    raising = DOWN

    @staticmethod
    def level_of(context: ActionContext) -> int:
        return context.l

    @property
    def parameter(self) -> Fraction:
        return 1 / self.context.t

    def _raise(self, inner: HeckeModule) -> HeckeModule:
        return CoinducedModule(inner)

    # --- generators ---

    def _dot(self, label: int, inner: HeckeModule, dom: RestrictedModule, cod: RestrictedModule) -> Matrix:
        return inner.act(self.context.x_power(inner.level, inner.level, label))

    def _cross(self, label: int, inner: HeckeModule, dom: RestrictedModule, cod: RestrictedModule) -> Matrix:
        m = inner.level
        tau = inner.act(HeckeElement.tau(m - 1, m))
        return -tau + self.z * sympy.eye(tau.rows)

    def _cup_right(self, label: int, inner: HeckeModule, dom: HeckeModule, cod: CoinducedModule) -> Matrix:
        return Matrix.vstack(*[inner.act(b) for b in cod.cosets])

    def _cap_right(self, label: int, inner: HeckeModule, dom: RestrictedModule, cod: HeckeModule) -> Matrix:
        coinduced: CoinducedModule = dom.inner
        unit = coinduced.unit_block()
        blocks = [
            sympy.eye(inner.dim) if i == unit else sympy.zeros(inner.dim, inner.dim)
            for i in range(len(coinduced.cosets))
        ]
        return Matrix.hstack(*blocks)

    def _cup_left(self, label: int, inner: HeckeModule, dom: HeckeModule, cod: RestrictedModule) -> Matrix:
        scale = 1 / (_rational(self.context.t) * self.z)
        coinduced: CoinducedModule = cod.inner
        return Matrix.vstack(*[scale * inner.act(self.context.trace(b)) for b in coinduced.cosets])

    def _cap_left(self, label: int, inner: HeckeModule, dom: CoinducedModule, cod: HeckeModule) -> Matrix:
        ctx = self.context
        scale = _rational(ctx.t) * self.z
        m = inner.level
        total = sympy.zeros(cod.dim, dom.dim)
        for b, dual in zip(ctx.right_cosets(m), ctx.trace_duals(m)):
            total += inner.act(b) * dom.evaluation(dual)
        return scale * total


def action_for(dual: bool, f: CyclotomicPoly, point=None, parameter=None) -> HeisenbergAction:
    cls = DualHeisenbergAction if dual else HeisenbergAction
    context = ActionContext(f, point, parameter)
    return cache_manager.get_or_compute("action", (cls.name,) + context.key, lambda: cls(context))


def psi_object(word, f: CyclotomicPoly, n: int, point=None) -> ModuleDescriptor:
    """Ψ_f(word) applied to the regular module H_n^f."""
    return action_for(False, f, point).descriptor(word, n)


def psi_dual_object(word, f: CyclotomicPoly, n: int, point=None) -> ModuleDescriptor:
    return action_for(True, f, point).descriptor(word, n)


def psi_morphism(m: Morphism, f: CyclotomicPoly, n: int, point=None) -> ActionMatrix:
    """Matrix of Ψ_f(m) on H_n^f, for m a morphism of Heis_{-l}(z,t)."""
    return action_for(False, f, point).morphism(m, n)


def psi_dual_morphism(m: Morphism, f: CyclotomicPoly, n: int, point=None) -> ActionMatrix:
    """Matrix of Ψ^∨_f(m) on H_n^f, for m a morphism of Heis_l(z,t^{-1})."""
    return action_for(True, f, point).morphism(m, n)


# --- generalized cyclotomic quotients ---

def _monic(p) -> Tuple[Scalar, ...]:
    coeffs = tuple(p.coeffs) if isinstance(p, CyclotomicPoly) else tuple(coerce_scalar(c) for c in p)
    if not coeffs or coeffs[0] != Scalar.one():
        raise ParameterMismatch("polynomials must be monic with f_0 = 1")
    return coeffs


def _quotient(numerator: Sequence[Scalar], denominator: Sequence[Scalar], order: int) -> List[Scalar]:
    """Power series numerator/denominator to `order` terms; denominator[0] must be a unit."""
    lead = invert_unit(denominator[0])
    out: List[Scalar] = []
    for i in range(order):
        c = numerator[i] if i < len(numerator) else Scalar.zero()
        for j in range(1, min(i, len(denominator) - 1) + 1):
            c = c - denominator[j] * out[i - j]
        out.append(c * lead)
    return out


def _product(a: Sequence, b: Sequence, order: int) -> List:
    out = []
    for i in range(order):
        total = a[0] * 0
        for j in range(i + 1):
            if j < len(a) and i - j < len(b):
                total = total + a[j] * b[i - j]
        out.append(total)
    return out


@dataclass
class GCQSeries:
    """
    Truncated expansions of g/f at w=∞ and of t^2 g/f at w=0, with their inverses.
    o_plus[i] is the coefficient of w^{k-i}, o_plus_tilde[i] of w^{-k-i},
    o_minus[i] and o_minus_tilde[i] of w^i.
    """
    f: Tuple[Scalar, ...]
    g: Tuple[Scalar, ...]
    k: int
    order: int
    o_plus: List[Scalar]
    o_plus_tilde: List[Scalar]
    o_minus: List[Scalar]
    o_minus_tilde: List[Scalar]

    def bubble_values(self, which: str) -> Dict[int, Scalar]:
        """The scalars a bubble of the named series takes in the quotient, by label."""
        if which == "plus":
            return {i - self.k: zt(-1, 1) * c for i, c in enumerate(self.o_plus)}
        if which == "plus-tilde":
            return {self.k + i: -(zt(-1, -1) * c) for i, c in enumerate(self.o_plus_tilde)}
        if which == "minus":
            return {-i: -(zt(-1, -1) * c) for i, c in enumerate(self.o_minus)}
        if which == "minus-tilde":
            return {-i: zt(-1, 1) * c for i, c in enumerate(self.o_minus_tilde)}
        raise ParameterMismatch(f"unknown series {which!r}")

    def check_inverse(self) -> bool:
        one = [Scalar.one()] + [Scalar.zero()] * (self.order - 1)
        plus = _product(self.o_plus, self.o_plus_tilde, self.order)
        minus = _product(self.o_minus, self.o_minus_tilde, self.order)
        return plus == one and minus == one

    def to_dict(self) -> Dict:
        return {
            "f": [render_scalar(c) for c in self.f],
            "g": [render_scalar(c) for c in self.g],
            "k": self.k,
            "order": self.order,
            "plus": {str(n): render_scalar(c) for n, c in self.bubble_values("plus").items()},
            "plus_tilde": {str(n): render_scalar(c) for n, c in self.bubble_values("plus-tilde").items()},
            "minus": {str(n): render_scalar(c) for n, c in self.bubble_values("minus").items()},
            "minus_tilde": {str(n): render_scalar(c) for n, c in self.bubble_values("minus-tilde").items()},
        }


def gcq_series(f, g, order: int) -> GCQSeries:
    """Expansions for the generalized cyclotomic quotient H(f|g); needs t^2 = f_l / g_m."""
    f, g = _monic(f), _monic(g)
    l, m = len(f) - 1, len(g) - 1
    if f[-1] != T * T * g[-1]:
        raise ParameterMismatch(
            f"t^2 = f_l/g_m fails: f_l = {render_scalar(f[-1])}, g_m = {render_scalar(g[-1])}"
        )
    if not g[-1].is_unit():
        raise ParameterMismatch(f"g_m = {render_scalar(g[-1])} must be a unit")
    t2 = T * T
    t_2 = invert_unit(t2)
    series = GCQSeries(
        f=f, g=g, k=m - l, order=order,
        o_plus=_quotient(g, f, order),
        o_plus_tilde=_quotient(f, g, order),
        o_minus=[t2 * c for c in _quotient(g[::-1], f[::-1], order)],
        o_minus_tilde=[t_2 * c for c in _quotient(f[::-1], g[::-1], order)],
    )
    logger.debug("gcq series for k=%d to order %d", series.k, order)
    return series


# --- vacuum evaluation ---

@dataclass
class VacuumReport:
    """A closed diagram and the (+) bubble series evaluated on the vacuum (H_0^f, H_0^g)."""
    blue: Optional[Fraction]
    red: Optional[Fraction]
    blue_series: List[Fraction]
    red_series: List[Fraction]
    product: List[Fraction]
    expected: List[Fraction]

    @property
    def matches(self) -> bool:
        return self.product == self.expected

    def to_dict(self) -> Dict:
        return {
            "blue": str(self.blue) if self.blue is not None else None,
            "red": str(self.red) if self.red is not None else None,
            "blue_series": [str(c) for c in self.blue_series],
            "red_series": [str(c) for c in self.red_series],
            "product": [str(c) for c in self.product],
            "expected": [str(c) for c in self.expected],
            "matches": self.matches,
        }


def _plus_series(action: HeisenbergAction, order: int) -> List[Fraction]:
    """Normalised coefficients of the counterclockwise (+) series at H_0, leading term first."""
    norm = action.z / action.t
    out = []
    for i in range(order):
        value = action.bubble(CCW, PLUS, -action.k + i, EMPTY, 0)
        entry = norm * value[0, 0]
        out.append(Fraction(int(entry.p), int(entry.q)))
    return out


def vacuum_eval(m: Morphism, f, g, order: int = 4, point=None) -> VacuumReport:
    """
    Evaluate a closed morphism on H_0^f through Ψ_f and on H_0^g through Ψ^∨_g,
    and check the product of the two (+) series against the expansion of g/f.
    """
    if m.source or m.target:
        raise NotAScalar(f"vacuum evaluation needs a morphism 𝟙 → 𝟙, got {m.source} → {m.target}")
    full = {"z": Fraction(GENERIC_Z), "t": Fraction(GENERIC_T)}
    full.update({name: Fraction(v) for name, v in (point or {}).items()})
    f_coeffs, g_coeffs = _monic(f), _monic(g)
    series = gcq_series(f_coeffs, g_coeffs, order)
    g_last = specialize(g_coeffs[-1], full)
    v = _rational_sqrt(g_last) if len(g_coeffs) > 1 else Fraction(1)
    u = full["t"] * v

    blue = red = None
    blue_series = [Fraction(1)] + [Fraction(0)] * (order - 1)
    red_series = list(blue_series)
    if len(f_coeffs) > 1:
        psi = action_for(False, CyclotomicPoly(f_coeffs), full, u)
        blue = psi.morphism(m, 0).scalar()
        blue_series = _plus_series(psi, order)
    if len(g_coeffs) > 1:
        psi_dual = action_for(True, CyclotomicPoly(g_coeffs), full, v)
        red = psi_dual.morphism(m, 0).scalar()
        red_series = _plus_series(psi_dual, order)
    product = _product(blue_series, red_series, order)
    expected = [specialize(c, full) for c in series.o_plus]
    report = VacuumReport(blue, red, blue_series, red_series, product, expected)
    logger.info("vacuum evaluation at k=%d: series %s", series.k, "match" if report.matches else "MISMATCH")
    return report


# --- oracles ---

@dataclass
class OracleReport:
    name: str
    checked: int = 0
    passed: int = 0
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.passed == self.checked

    def record(self, label: str, passed: bool) -> None:
        self.checked += 1
        if passed:
            self.passed += 1
        else:
            self.failures.append(label)

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "checked": self.checked,
            "passed": self.passed,
            "failures": self.failures[:20],
        }


def relation_matrices(f: CyclotomicPoly, n: int, suites: Sequence[str] = SUITES, point=None) -> OracleReport:
    """Every relation instance at k = -l as a matrix identity under Ψ_f on H_n^f."""
    psi = action_for(False, f, point)
    report = OracleReport(f"relations(l={f.l}, n={n})")
    for suite in suites:
        for relation in relations_in(suite):
            for name, lhs, rhs in relation.instances(psi.k):
                try:
                    report.record(name, psi.morphism(lhs, n) == psi.morphism(rhs, n))
                except HeisError as e:
                    logger.warning("relation %s under Ψ_f failed: %s", name, e)
                    report.record(f"{name}: {e}", False)
    return report


def separation_rank(f: CyclotomicPoly, n: int, point=None) -> Tuple[int, int]:
    """(rank, count) of the Ψ_f images of the dotted braid basis of End(↑^n) on H_0^f."""
    psi = action_for(False, f, point)
    word = ObjectWord(UP * n)
    columns = []
    for r, g in ak_basis(n, f.l):
        steps = [(Gen.CROSS_POS, n - 1 - i) for i in reduced_word(g)]
        steps += [(Gen.DOT_UP, n - i, r[i - 1]) for i in range(1, n + 1) if r[i - 1]]
        image = psi.morphism(Morphism.from_steps(word, steps), 0).entries
        columns.append(image.reshape(image.rows * image.cols, 1))
    return Matrix.hstack(*columns).rank(), len(columns)


def _random_endomorphism(rng: random.Random, word: ObjectWord, length: int) -> Morphism:
    steps = []
    for _ in range(length):
        choice = rng.randrange(3)
        pairs = [p for p in range(len(word) - 1) if word[p] == word[p + 1] == UP]
        if choice == 0 and pairs:
            steps.append((rng.choice((Gen.CROSS_POS, Gen.CROSS_NEG)), rng.choice(pairs)))
        elif choice == 1 or not word:
            region = rng.randrange(len(word) + 1)
            orientation = rng.choice((CW, CCW))
            sign = rng.choice((PLAIN, PLUS, MINUS))
            steps.append((Gen.BUBBLE, region, rng.randrange(3), orientation, sign))
        else:
            p = rng.randrange(len(word))
            kind = Gen.DOT_UP if word[p] == UP else Gen.DOT_DOWN
            steps.append((kind, p, rng.randint(-1, 2)))
    return Morphism.from_steps(word, steps)


def functoriality_trials(f: CyclotomicPoly, trials: int, seed: int, n: int = 0, point=None) -> OracleReport:
    """Ψ_f respects composition and tensor products on random endomorphisms."""
    psi = action_for(False, f, point)
    rng = random.Random(seed)
    report = OracleReport(f"functoriality(l={f.l}, n={n})")
    words = [ObjectWord(w) for w in ("U", "D", "UU", "UD", "DU")]
    small = [ObjectWord(w) for w in ("U", "D")]
    for trial in range(trials):
        word = rng.choice(words)
        a = _random_endomorphism(rng, word, rng.randint(1, 3))
        b = _random_endomorphism(rng, word, rng.randint(1, 3))
        report.record(f"compose#{trial}", psi.morphism(compose(a, b), n) == psi.morphism(a, n) @ psi.morphism(b, n))
        left, right = rng.choice(small), rng.choice(words)
        c = _random_endomorphism(rng, left, 1)
        d = _random_endomorphism(rng, right, 1)
        split = psi.morphism(tensor(c, Morphism.identity(right)), n) @ psi.morphism(tensor(Morphism.identity(left), d), n)
        report.record(f"tensor#{trial}", psi.morphism(tensor(c, d), n) == split)
    return report


def soundness_trials(f: CyclotomicPoly, trials: int, seed: int, n: int = 0,
                     budget: Optional[int] = None, point=None,
                     suites: Sequence[str] = SUITES) -> OracleReport:
    """
    Pairs that the rewriter identifies must act identically. Pairs come from
    relation instances at k = -l placed next to an extra strand and under a dot;
    a pair the rewriter fails to identify counts as a failure.
    """
    psi = action_for(False, f, point)
    rng = random.Random(seed)
    report = OracleReport(f"soundness(l={f.l}, n={n})")
    pool = [inst for suite in suites for relation in relations_in(suite) for inst in relation.instances(psi.k)]
    for _ in range(trials):
        name, lhs, rhs = rng.choice(pool)
        side = ObjectWord(rng.choice(("", "U", "D")))
        if rng.random() < 0.5:
            a, b = tensor(Morphism.identity(side), lhs), tensor(Morphism.identity(side), rhs)
        else:
            a, b = tensor(lhs, Morphism.identity(side)), tensor(rhs, Morphism.identity(side))
        top = _random_endomorphism(rng, a.target, 1)
        a, b = compose(top, a), compose(top, b)
        try:
            if normalize(a, psi.k, budget) != normalize(b, psi.k, budget):
                report.record(f"{name}: normal forms differ", False)
                continue
            report.record(name, psi.morphism(a, n) == psi.morphism(b, n))
        except HeisError as e:
            logger.warning("soundness pair from %s failed: %s", name, e)
            report.record(f"{name}: {e}", False)
    logger.info("soundness: %d of %d pairs agree", report.passed, report.checked)
    return report


def faithfulness_trials(f: CyclotomicPoly, trials: int, seed: int, n: int = 0,
                        budget: Optional[int] = None, point=None, **shape) -> OracleReport:
    """
    Ψ_f(m) == Ψ_f(embed(normalize(m))) for random diagrams m at k = -l.

    Args:
        shape: bounds passed to rewrite.random_morphism
    """
    psi = action_for(False, f, point)
    rng = random.Random(seed)
    report = OracleReport(f"faithfulness(l={f.l}, n={n})")
    for trial in range(trials):
        m = random_morphism(rng, **shape)
        label = f"diagram#{trial}: {render(m)}"
        try:
            straightened = embed_normal_form(normalize(m, psi.k, budget))
            report.record(label, psi.morphism(m, n) == psi.morphism(straightened, n))
        except HeisError as e:
            logger.warning("faithfulness trial %d failed: %s", trial, e)
            report.record(f"{label}: {e}", False)
    logger.info("faithfulness: %d of %d diagrams agree with their normal forms", report.passed, report.checked)
    return report
