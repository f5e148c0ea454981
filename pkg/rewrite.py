"""
Rewrite: normal forms of morphisms in Heis_k(z, t) over the Sym⊗Sym basis.

A morphism X -> Y is bent into Hom(𝟙, X^∨ ⊗ Y), where every strand ends on the top
boundary. Basis vectors are (matching, dots): a perfect matching of the bent word
pairing each ↑ letter with a ↓ letter, plus a dot exponent at each ↑ letter (the
strand's terminus). The canonical lift of a matching is built by repeatedly
peeling its rightmost reducible position (an adjacent cup, or two crossing
chords at neighbouring positions). Slices of a diagram are folded one at a time
into a linear combination of basis vectors.
"""

import logging
import random
import sys
from itertools import combinations
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from cache_manager import cache_manager
from diagrams import (DOWN, UP, Diagram, Gen, Morphism, ObjectWord, Slice, Step, compose,
                      crossing_steps, render)
from error_handler import NonTermination, ParameterMismatch, TypeMismatch
from heis_defaults import normalize_budget
from scalars import ONE, Z, Scalar, zt
from symfunc import (CCW, CW, MINUS, PLAIN, PLUS, SymSym, beta_dict, bubble_symsym,
                     render_sym)

logger = logging.getLogger("heiscat.rewrite")

Word = Tuple[str, ...]
Matching = Tuple[int, ...]
DotVector = Tuple[int, ...]
Basis = Tuple[Matching, DotVector]
State = Dict[Basis, SymSym]
Op = Tuple

SYM_ONE = SymSym.one()


# --- matchings ---

def _chord(partner: Matching, p: int) -> Tuple[int, int]:
    return (p, partner[p]) if p < partner[p] else (partner[p], p)


def chords_cross(partner: Matching, p: int, q: int) -> bool:
    a1, a2 = _chord(partner, p)
    b1, b2 = _chord(partner, q)
    return a1 < b1 < a2 < b2 or b1 < a1 < b2 < a2


def is_reducible(partner: Matching, p: int) -> bool:
    if p < 0 or p + 1 >= len(partner):
        return False
    return partner[p] == p + 1 or chords_cross(partner, p, p + 1)


def reducible_positions(partner: Matching) -> List[int]:
    return [p for p in range(len(partner) - 1) if is_reducible(partner, p)]


def crossing_number(partner: Matching) -> int:
    n = len(partner)
    return sum(1 for p in range(n) for q in range(p + 1, n)
               if p < partner[p] and q < partner[q] and chords_cross(partner, p, q))


def remove_pair(partner: Matching, p: int) -> Matching:
    """Drop positions p, p+1 (which must be paired with each other or get joined)."""
    a, b = partner[p], partner[p + 1]
    joined = {}
    if a != p + 1:
        joined[a], joined[b] = b, a

    def index(i: int) -> int:
        return i - 2 if i > p + 1 else i

    return tuple(index(joined.get(i, partner[i])) for i in range(len(partner)) if i not in (p, p + 1))


def insert_cup(partner: Matching, p: int) -> Matching:
    def index(i: int) -> int:
        return i + 2 if i >= p else i

    body = [index(j) for j in partner]
    return tuple(body[:p] + [p + 1, p] + body[p:])


def swap_positions(partner: Matching, p: int) -> Matching:
    def s(i: int) -> int:
        return p + 1 if i == p else p if i == p + 1 else i

    out = [0] * len(partner)
    for i, j in enumerate(partner):
        out[s(i)] = s(j)
    return tuple(out)


def swap_word(word: Word, p: int) -> Word:
    w = list(word)
    w[p], w[p + 1] = w[p + 1], w[p]
    return tuple(w)


def drop_pair(seq: Sequence, p: int) -> Tuple:
    return tuple(seq[:p]) + tuple(seq[p + 2:])


def valid_matching(word: Word, partner: Matching) -> bool:
    n = len(word)
    if len(partner) != n:
        return False
    return all(0 <= partner[i] < n and partner[partner[i]] == i and partner[i] != i
               and word[i] != word[partner[i]] for i in range(n))


def all_matchings(word: Word) -> List[Matching]:
    """Every perfect matching of the word pairing ↑ letters with ↓ letters."""
    ups = [i for i, l in enumerate(word) if l == UP]
    downs = [i for i, l in enumerate(word) if l == DOWN]
    if len(ups) != len(downs):
        return []
    out = []

    def extend(i: int, used: frozenset, acc: Dict[int, int]):
        if i == len(ups):
            partner = [0] * len(word)
            for u, d in acc.items():
                partner[u], partner[d] = d, u
            out.append(tuple(partner))
            return
        for d in downs:
            if d not in used:
                acc[ups[i]] = d
                extend(i + 1, used | {d}, acc)
                del acc[ups[i]]

    extend(0, frozenset(), {})
    return sorted(out)


def bent_word(source: ObjectWord, target: ObjectWord) -> Word:
    return tuple(ObjectWord(source).dual()) + tuple(target)


def nested_cups(source: ObjectWord) -> Tuple[Word, Matching]:
    """Identity of X bent into 𝟙 -> X^∨ ⊗ X."""
    m = len(source)
    word = tuple(ObjectWord(source).dual()) + tuple(source)
    return word, tuple(2 * m - 1 - i for i in range(2 * m))


# --- linear combinations ---

def add_into(acc: State, state: State, coeff=None) -> State:
    for basis, value in state.items():
        if coeff is not None:
            value = value * coeff
        total = acc.get(basis)
        total = value if total is None else total + value
        if total.is_zero():
            acc.pop(basis, None)
        else:
            acc[basis] = total
    return acc


def combine(*parts: Tuple[State, object]) -> State:
    acc: State = {}
    for state, coeff in parts:
        add_into(acc, state, coeff)
    return acc


def basis_state(partner: Matching, dots: Optional[DotVector] = None) -> State:
    return {(partner, dots if dots is not None else (0,) * len(partner)): SYM_ONE}


def add_top_dots(state: State, extra: DotVector) -> State:
    """Multiply by dots sitting above every strand end (only ↑ ends carry any)."""
    if not any(extra):
        return state
    out: State = {}
    for (partner, dots), value in state.items():
        key = (partner, tuple(a + b for a, b in zip(dots, extra)))
        add_into(out, {key: value})
    return out


# --- dot slides ---

def divided_difference(a: int) -> Dict[Tuple[int, int], int]:
    """x_L · (x_L^a - x_R^a)/(x_L - x_R) as {(i, j): c} for x_L^i x_R^j."""
    out: Dict[Tuple[int, int], int] = {}
    if a > 0:
        for i in range(a):
            out[(i + 1, a - 1 - i)] = out.get((i + 1, a - 1 - i), 0) + 1
    elif a < 0:
        m = -a
        for i in range(m):
            key = (i - m + 1, m - 1 - i - m)
            out[key] = out.get(key, 0) - 1
    return out


# --- bubbles ---

def bubble_value(orientation: str, sign: str, label: int, k: int) -> SymSym:
    """Sym⊗Sym value of a bubble; plain bubbles split as (+) plus (-)."""
    if orientation not in (CW, CCW):
        raise ParameterMismatch(f"unknown orientation {orientation!r}")
    if sign == PLAIN:
        return bubble_symsym(orientation, PLUS, label, k) + bubble_symsym(orientation, MINUS, label, k)
    return bubble_symsym(orientation, sign, label, k)


XSeries = Dict[int, SymSym]


def _series_mul(a: XSeries, b: XSeries) -> XSeries:
    out: XSeries = {}
    for i, u in a.items():
        for j, v in b.items():
            w = out.get(i + j)
            w = u * v if w is None else w + u * v
            if w.is_zero():
                out.pop(i + j, None)
            else:
                out[i + j] = w
    return out


def _series_add(a: XSeries, b: XSeries, c: Scalar = ONE) -> XSeries:
    out = dict(a)
    for i, v in b.items():
        w = out.get(i)
        w = v * c if w is None else w + v * c
        if w.is_zero():
            out.pop(i, None)
        else:
            out[i] = w
    return out


_MINUS_Z2 = zt(2, 0, -1)


def _slide_generator(letter: str, slot: int, n: int) -> XSeries:
    """
    Image of e_n in one tensor slot when a bubble moves rightward across a strand:
    the result maps dot exponent s on that strand to the bubble left on the right.
    """
    key = ("slide", letter, slot, n)
    cached = cache_manager.get("bubbles", key)
    if cached is not None:
        return cached
    direction = 1 if slot == 0 else -1
    if n == 0:
        result = {0: SYM_ONE}
    elif letter == DOWN:
        result = {0: SymSym.e(n, slot)}
        for s in range(1, n + 1):
            result = _series_add(result, {direction * s: SymSym.e(n - s, slot) * s}, _MINUS_Z2)
    else:
        result = {}
        for s in range(1, n + 1):
            term = _series_mul(_slide_h(slot, s), _slide_generator(letter, slot, n - s))
            result = _series_add(result, term, ONE if s % 2 else -ONE)
    cache_manager.put("bubbles", key, result)
    return result


def _slide_h(slot: int, n: int) -> XSeries:
    direction = 1 if slot == 0 else -1
    out: XSeries = {0: SymSym.h(n, slot)}
    for s in range(1, n + 1):
        sign = 1 if s % 2 == 0 else -1
        out = _series_add(out, {direction * s: SymSym.h(n - s, slot) * (sign * s)}, _MINUS_Z2)
    return out


def slide_across(theta: SymSym, letter: str) -> XSeries:
    """Move a Sym⊗Sym bubble value from the left of a strand to its right."""
    out: XSeries = {}
    for (left, right), coeff in theta.items():
        image: XSeries = {0: SYM_ONE}
        for part in left:
            image = _series_mul(image, _slide_generator(letter, 0, part))
        for part in right:
            image = _series_mul(image, _slide_generator(letter, 1, part))
        out = _series_add(out, image, coeff)
    return out


# --- curls ---

def curl_terms(side: str, positive: bool, dots: int, k: int) -> List[Tuple[Scalar, int, SymSym]]:
    """
    A curl with `dots` on its loop as Σ coeff · x^b · bubble.
    side "left": loop on the left, counterclockwise bubbles to the left of the strand;
    side "right": clockwise bubbles to the right.
    """
    a = dots
    out: List[Tuple[Scalar, int, SymSym]] = []

    def emit(coeff: Scalar, b: int, orientation: str, sign: str):
        value = bubble_symsym(orientation, sign, a - b, k)
        if not value.is_zero():
            out.append((coeff, b, value))

    if side == "left":
        first = 0 if positive else 1
        for b in range(first, a + k + 1):
            emit(Z, b, CCW, PLUS)
        for b in range(a, first):
            emit(-Z, b, CCW, MINUS)
    else:
        last = 0 if positive else -1
        for b in range(a, last + 1):
            emit(Z, b, CW, MINUS)
        for b in range(last + 1, a - k + 1):
            emit(-Z, b, CW, PLUS)
    return out


def curl_program(side: str, strand: int, k: int, dots: int = 0, positive: bool = True) -> List[Tuple[Scalar, List[Op]]]:
    """Curl on the ↑ strand at `strand` as weighted op programs."""
    region = strand if side == "left" else strand + 1
    return [(c, [("dot", strand, b), ("bub", region, theta)])
            for c, b, theta in curl_terms(side, positive, dots, k)]


# --- op programs ---

def op_output(word: Word, op: Op) -> Word:
    kind = op[0]
    if kind in ("dot", "bub"):
        return word
    if kind in ("x", "xneg"):
        return swap_word(word, op[1])
    if kind == "cup":
        p = op[1]
        return word[:p] + tuple(op[2]) + word[p:]
    if kind == "cap":
        return drop_pair(word, op[1])
    raise ParameterMismatch(f"unknown op {kind!r}")


_ARITY = {"dot": (1, 1), "x": (2, 2), "xneg": (2, 2), "cup": (0, 2), "cap": (2, 0), "bub": (0, 0)}


def commute_ops(below: Op, above: Op) -> Optional[Tuple[Op, Op]]:
    """
    Slide two stacked ops past each other when they touch disjoint strands.

    Returns:
        (new below, new above) with positions adjusted, or None when they overlap
    """
    pa, (wa, oa) = below[1], _ARITY[below[0]]
    pb, (wb, ob) = above[1], _ARITY[above[0]]
    if pb > pa + oa:
        return (above[0], pb - oa + wa) + tuple(above[2:]), below
    if pb + wb < pa:
        return above, (below[0], pa - wb + ob) + tuple(below[2:])
    return None


def rewrite_measure(word: Word, op: Op, partner: Matching) -> Tuple[int, int, int, int, int]:
    """
    Termination measure of op stacked on lift(partner): negative crossings,
    crossings, dot-to-terminus displacement, bubble-to-right-edge displacement, curls.
    """
    kind, p = op[0], op[1]
    negative = 1 if kind == "xneg" else 0
    crossings = crossing_number(partner) + (1 if kind in ("x", "xneg") else 0)
    dots = abs(partner[p] - p) if kind == "dot" and word[p] == DOWN else 0
    bubbles = len(word) - p if kind == "bub" else 0
    curls = 1 if kind == "cap" and partner[p] != p + 1 and chords_cross(partner, p, p + 1) else 0
    return negative, crossings, dots, bubbles, curls


def smoothing_ops(word: Word, p: int) -> List[Op]:
    """Resolution of the crossing at p into cap-then-cup (empty for parallel strands)."""
    if word[p] == word[p + 1]:
        return []
    return [("cap", p), ("cup", p, (word[p + 1], word[p]))]


def shift_ops(ops: Iterable[Op], offset: int) -> List[Op]:
    return [(op[0], op[1] + offset) + tuple(op[2:]) for op in ops]


def _flip(letter: str) -> str:
    return DOWN if letter == UP else UP


def rotate_program(ops: Sequence[Op], word: Word) -> Tuple[List[Op], Word]:
    """180° rotation of a program; returns the rotated ops and their start word."""
    words = [word]
    for op in ops:
        words.append(op_output(words[-1], op))
    out: List[Op] = []
    for op, w_in, w_out in reversed(list(zip(ops, words, words[1:]))):
        kind, p = op[0], op[1]
        n_in, n_out = len(w_in), len(w_out)
        if kind == "dot":
            out.append(("dot", n_in - 1 - p, op[2]))
        elif kind in ("x", "xneg"):
            out.append((kind, n_in - 2 - p))
        elif kind == "cup":
            out.append(("cap", n_out - p - 2))
        elif kind == "cap":
            out.append(("cup", n_out - p, (_flip(w_in[p + 1]), _flip(w_in[p]))))
        else:
            out.append(("bub", n_in - p, op[2]))
    return out, tuple(ObjectWord(words[-1]).dual())


def positive_part(ops: Sequence[Op]) -> List[Op]:
    return [("x", op[1]) if op[0] == "xneg" else op for op in ops]


def negative_expansion(ops: Sequence[Op], word: Word) -> List[Tuple[Scalar, List[Op]]]:
    """
    program - positive_part(program) as a sum over nonempty sets of negative
    crossings, each replaced by its smoothing with weight -z.
    """
    words = [word]
    for op in ops:
        words.append(op_output(words[-1], op))
    slots = [i for i, op in enumerate(ops) if op[0] == "xneg"]
    out = []
    for size in range(1, len(slots) + 1):
        for chosen in combinations(slots, size):
            program: List[Op] = []
            for i, op in enumerate(ops):
                if i in chosen:
                    program.extend(smoothing_ops(words[i], op[1]))
                elif op[0] == "xneg":
                    program.append(("x", op[1]))
                else:
                    program.append(op)
            out.append(((-Z) ** size, program))
    return out


def alternating_braid(k: int) -> Tuple[List[Op], List[Op], List[Tuple[Scalar, List[Op]]]]:
    """
    Braid relation for crossings on ↑↓↑: first - second = Σ weighted programs.
    Exactly one of the three crossings in each side is negative.
    """
    z3 = Z ** 3
    rhs: List[Tuple[Scalar, List[Op]]] = []
    if k >= 0:
        first = [("x", 0), ("xneg", 1), ("x", 0)]
        second = [("x", 1), ("xneg", 0), ("x", 1)]
        for total in range(1, k + 1):
            theta = bubble_symsym(CCW, PLUS, -total, k)
            for c in range(1, total + 1):
                for a in range(total - c + 1):
                    b = total - c - a
                    rhs.append((z3, [("dot", 0, b), ("cap", 0), ("dot", 0, c), ("cup", 0, (UP, DOWN)),
                                     ("dot", 0, a), ("bub", 0, theta)]))
    else:
        first = [("xneg", 0), ("x", 1), ("xneg", 0)]
        second = [("xneg", 1), ("x", 0), ("xneg", 1)]
        for total in range(1, -k + 1):
            theta = bubble_symsym(CW, PLUS, -total, k)
            for c in range(1, total + 1):
                for a in range(total - c + 1):
                    b = total - c - a
                    rhs.append((z3, [("dot", 2, b), ("cap", 1), ("dot", 0, c), ("cup", 1, (DOWN, UP)),
                                     ("dot", 2, a), ("bub", 3, theta)]))
    return first, second, rhs


def r2_programs(letters: Tuple[str, str], q: int, k: int) -> List[Tuple[Scalar, List[Op]]]:
    """
    Two sideways crossings stacked at q, bottom word given by `letters`,
    rewritten as crossing-reduced programs.
    """
    zz = Z * Z
    out: List[Tuple[Scalar, List[Op]]] = [(ONE, [])]
    if letters == (DOWN, UP):
        out.append((zt(1, 1), [("cap", q), ("cup", q, (DOWN, UP))]))
        for total in range(2, -k + 1):
            theta = bubble_symsym(CW, PLUS, -total, k)
            for a in range(1, total):
                out.append((zz, [("dot", q + 1, total - a), ("cap", q), ("cup", q, (DOWN, UP)),
                                 ("dot", q + 1, a), ("bub", q, theta)]))
        return out
    out.append((zt(1, -1, -1), [("cap", q), ("cup", q, (UP, DOWN))]))
    for total in range(2, k + 1):
        theta = bubble_symsym(CCW, PLUS, -total, k)
        for a in range(1, total):
            out.append((zz, [("dot", q, total - a), ("cap", q), ("cup", q, (UP, DOWN)),
                             ("dot", q, a), ("bub", q + 2, theta)]))
    out.append((Z, [("cap", q), ("cup", q, (DOWN, UP)), ("x", q)]))
    out.append((Z, [("x", q), ("cap", q), ("cup", q, (UP, DOWN))]))
    out.append((-zz, [("cap", q), ("bub", q, bubble_value(CCW, PLAIN, 0, k)), ("cup", q, (UP, DOWN))]))
    return out


# --- rule table ---

# op kind -> (handler, oriented rewrite it implements)
RULES: Dict[str, Tuple[str, str]] = {
    "dot": ("_apply_dot", "dots on ↓ ends slide down to the ↑ terminus of their strand"),
    "cup": ("_apply_cup", "a cup on a lift is the lift of the extended matching"),
    "cap": ("_apply_cap", "caps close bubbles, straighten zigzags and untwist curls"),
    "x": ("_apply_cross", "positive crossings: quadratic, inversion and braid relations"),
    "xneg": ("_apply_negative_cross", "negative crossing = positive crossing - z · smoothing"),
    "bub": ("_apply_bubble", "bubbles slide to the right edge and become coefficients"),
}


class Engine:
    """
    Straightening engine for one central charge k.
    Results are memoised in cache_manager under the engine's namespace; a seed
    randomises the order in which slices on disjoint strands are folded and the
    free choices (which dotted strand moves first, which reducible position a cap
    is pushed through) without changing results.
    """

    def __init__(self, k: int, budget: Optional[int] = None, seed: Optional[int] = None, debug: bool = False):
        """
        Args:
            k: central charge
            budget: maximum number of fresh rewrite steps (HEISCAT_BUDGET by default)
            seed: randomise rule-application order for confluence sampling
            debug: check every folded slice against the crossing-number bound
        """
        self.k = k
        self.budget = budget or normalize_budget()
        self.seed = seed
        self.debug = debug
        self.steps = 0
        self.rule_counts: Dict[str, int] = {name: 0 for name in RULES}
        self._rng = random.Random(seed) if seed is not None else None
        self._ns = (k,) if seed is None else (k, seed)
        self._dispatch: Dict[str, Callable] = {name: getattr(self, handler) for name, (handler, _) in RULES.items()}
        sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

    # --- bookkeeping ---

    def _tick(self, rule: str) -> None:
        self.steps += 1
        self.rule_counts[rule] += 1
        if self.steps > self.budget:
            raise NonTermination(f"rewrite budget of {self.budget} steps exhausted at k={self.k}", self.budget)

    def _memo(self, name: str, key: Tuple, compute: Callable[[], State]) -> State:
        return cache_manager.get_or_compute("rewrite", (name, self._ns) + key, compute)

    def _choose(self, options: Sequence):
        if self._rng is None or len(options) == 1:
            return options[0]
        return self._rng.choice(list(options))

    # --- folding ---

    def apply(self, word: Word, op: Op, state: State) -> Tuple[Word, State]:
        out: State = {}
        for (partner, dots), value in state.items():
            add_into(out, self.apply_basis(word, op, partner, dots), value)
        return op_output(word, op), out

    def apply_basis(self, word: Word, op: Op, partner: Matching, dots: DotVector) -> State:
        def compute() -> State:
            self._tick(op[0])
            return self._dispatch[op[0]](word, op, partner, dots)

        return self._memo("apply", (word, op, partner, dots), compute)

    def run(self, word: Word, state: State, ops: Iterable[Op]) -> Tuple[Word, State]:
        for op in ops:
            word, state = self.apply(word, op, state)
        return word, state

    def run_weighted(self, word: Word, state: State, programs: Iterable[Tuple[Scalar, List[Op]]]) -> State:
        acc: State = {}
        for coeff, ops in programs:
            _, result = self.run(word, state, ops)
            add_into(acc, result, coeff)
        return acc

    # --- canonical lifts ---

    @staticmethod
    def rightmost(partner: Matching) -> int:
        positions = reducible_positions(partner)
        if not positions:
            raise NonTermination(f"matching {partner} has no reducible position")
        return positions[-1]

    @staticmethod
    def peel(word: Word, partner: Matching, r: int) -> Tuple[Op, Word, Matching]:
        """The top op of a lift at r, with the word and matching below it."""
        if partner[r] == r + 1:
            return ("cup", r, (word[r], word[r + 1])), drop_pair(word, r), remove_pair(partner, r)
        return ("x", r), swap_word(word, r), swap_positions(partner, r)

    @classmethod
    def lift_ops(cls, word: Word, partner: Matching) -> List[Op]:
        """Bottom-to-top ops of the canonical lift (starting from the empty word)."""
        ops: List[Op] = []
        while partner:
            op, word, partner = cls.peel(word, partner, cls.rightmost(partner))
            ops.append(op)
        return list(reversed(ops))

    # --- differences between lifts ---

    def delta(self, word: Word, partner: Matching, q: int) -> State:
        """T_q ∘ lift(M with q undone) - lift(M), for a reducible position q."""
        def compute() -> State:
            r = self.rightmost(partner)
            if q == r:
                return {}
            p = min(x for x in reducible_positions(partner) if x > q)
            return combine((self.step_difference(word, partner, q, p), None),
                           (self.delta(word, partner, p), None))

        return self._memo("delta", (word, partner, q), compute)

    def step_difference(self, word: Word, partner: Matching, q: int, p: int) -> State:
        """Lift through q minus lift through p, for reducible q < p with none between."""
        op_q, w_q, m_q = self.peel(word, partner, q)
        op_p, w_p, m_p = self.peel(word, partner, p)
        if p >= q + 2:
            shift = 2 if op_q[0] == "cup" else 0
            _, first = self.apply(w_p, op_p, self.delta(w_p, m_p, q))
            _, second = self.apply(w_q, op_q, self.delta(w_q, m_q, p - shift))
            return combine((first, None), (second, -ONE))
        if partner[q] == q + 2:
            return {}
        if not (chords_cross(partner, q, q + 1) and chords_cross(partner, q + 1, q + 2)
                and chords_cross(partner, q, q + 2)):
            raise NonTermination(f"no braid move between {q} and {p} in {partner}")
        m_qp = swap_positions(m_q, q + 1)
        w_qp = swap_word(w_q, q + 1)
        m_pq = swap_positions(m_p, q)
        w_pq = swap_word(w_p, q)
        n_word = swap_word(w_qp, q)
        n_partner = swap_positions(m_qp, q)
        parts = [
            (self.braid_difference(n_word, n_partner, q), None),
            (self.run(w_qp, self.delta(w_qp, m_qp, q), [("x", q + 1), ("x", q)])[1], -ONE),
            (self.run(w_q, self.delta(w_q, m_q, q + 1), [("x", q)])[1], -ONE),
            (self.run(w_pq, self.delta(w_pq, m_pq, q + 1), [("x", q), ("x", q + 1)])[1], None),
            (self.run(w_p, self.delta(w_p, m_p, q), [("x", q + 1)])[1], None),
        ]
        return combine(*parts)

    def braid_difference(self, word: Word, partner: Matching, q: int) -> State:
        """(X_q X_{q+1} X_q - X_{q+1} X_q X_{q+1}) applied to lift(N), bottom op first."""
        window = word[q:q + 3]
        if window not in ((UP, DOWN, UP), (DOWN, UP, DOWN)):
            return {}
        first, second, rhs = alternating_braid(self.k)
        if window == (DOWN, UP, DOWN):
            base = (UP, DOWN, UP)
            rhs = [(c, rotate_program(ops, base)[0]) for c, ops in rhs]
            first, second = rotate_program(first, base)[0], rotate_program(second, base)[0]
        p_ops = [("x", 0), ("x", 1), ("x", 0)]
        q_ops = [("x", 1), ("x", 0), ("x", 1)]
        if positive_part(first) == p_ops and positive_part(second) == q_ops:
            sign = ONE
        elif positive_part(first) == q_ops and positive_part(second) == p_ops:
            sign = -ONE
        else:
            raise NonTermination(f"braid relation does not match window {window}")
        programs = list(rhs)
        programs += [(-c, ops) for c, ops in negative_expansion(first, window)]
        programs += [(c, ops) for c, ops in negative_expansion(second, window)]
        shifted = [(c * sign, shift_ops(ops, q)) for c, ops in programs]
        return self.run_weighted(word, basis_state(partner), shifted)

    # --- ops on lifts without dots ---

    def pure_cross(self, word: Word, partner: Matching, q: int) -> State:
        """Positive crossing at q on top of lift(M)."""
        def compute() -> State:
            w_q = swap_word(word, q)
            letters = (word[q], word[q + 1])
            if partner[q] == q + 1:
                if letters == (DOWN, UP):
                    programs = curl_program("left", q, self.k)
                else:
                    programs = curl_program("right", q + 1, self.k)
                return self.run_weighted(w_q, basis_state(partner), programs)
            if chords_cross(partner, q, q + 1):
                m_q = swap_positions(partner, q)
                delta = self.delta(word, partner, q)
                _, x_delta = self.apply(word, ("x", q), delta)
                if letters[0] == letters[1]:
                    main = combine((basis_state(partner), Z), (delta, Z), (basis_state(m_q), None))
                else:
                    main = self.run_weighted(w_q, basis_state(m_q), r2_programs((letters[1], letters[0]), q, self.k))
                return combine((main, None), (x_delta, -ONE))
            crossed = swap_positions(partner, q)
            return combine((basis_state(crossed), None), (self.delta(w_q, crossed, q), None))

        return self._memo("cross", (word, partner, q), compute)

    def pure_cap(self, word: Word, partner: Matching, q: int) -> State:
        """Cap at q on top of lift(M)."""
        def compute() -> State:
            w_out = drop_pair(word, q)
            zeros = (0,) * len(w_out)
            if partner[q] == q + 1:
                orientation = CW if word[q] == UP else CCW
                theta = bubble_value(orientation, PLAIN, 0, self.k)
                return self.apply(w_out, ("bub", q, theta), {(remove_pair(partner, q), zeros): SYM_ONE})[1]
            if (q > 0 and partner[q - 1] == q) or (q + 2 < len(word) and partner[q + 1] == q + 2):
                return basis_state(remove_pair(partner, q))
            if chords_cross(partner, q, q + 1):
                op, w_q, m_q = self.peel(word, partner, q)
                if word[q] == UP:
                    programs = curl_program("right", q + 1, self.k)
                else:
                    programs = curl_program("left", q, self.k)
                twisted = [(c, ops + [("cap", q)]) for c, ops in programs]
                main = self.run_weighted(w_q, basis_state(m_q), twisted)
                _, cap_delta = self.apply(word, ("cap", q), self.delta(word, partner, q))
                return combine((main, None), (cap_delta, -ONE))
            options = [p for p in reducible_positions(partner) if p < q - 1 or p > q + 1]
            if not options:
                raise NonTermination(f"cap at {q} cannot be moved past {partner}")
            p = self._choose(options[::-1])
            op, w_p, m_p = self.peel(word, partner, p)
            if p < q:
                q2, p2 = (q - 2, p) if op[0] == "cup" else (q, p)
            else:
                q2, p2 = q, p - 2
            w_mid, capped = self.apply(w_p, ("cap", q2), basis_state(m_p))
            _, main = self.apply(w_mid, (op[0], p2) + tuple(op[2:]), capped)
            _, cap_delta = self.apply(word, ("cap", q), self.delta(word, partner, p))
            return combine((main, None), (cap_delta, -ONE))

        return self._memo("cap", (word, partner, q), compute)

    def dot_push(self, word: Word, partner: Matching, p: int, a: int) -> State:
        """x^a on top of the ↓ end at p of lift(M), moved to ↑ termini."""
        def compute() -> State:
            n = len(word)
            other = partner[p]
            if abs(other - p) == 1:
                dots = [0] * n
                dots[other] = a
                return {(partner, tuple(dots)): SYM_ONE}
            r = self.rightmost(partner)
            op, w_r, m_r = self.peel(word, partner, r)
            if op[0] == "cup" or p not in (r, r + 1):
                below = p - 2 if op[0] == "cup" and p > r else p
                return self.apply(w_r, op, self.dot_push(w_r, m_r, below, a))[1]
            bottom = (w_r[r], w_r[r + 1])
            dd = divided_difference(a)
            if bottom == (DOWN, DOWN):
                start = r + 1 if p == r else r
                sign = -Z if p == r else Z
                corrections = [(sign * c, [("dot", r + 1, i), ("dot", r, j)]) for (i, j), c in dd.items()]
            elif bottom == (UP, DOWN):
                start = r + 1
                corrections = [(Z * c, [("dot", r, j), ("cap", r), ("cup", r, (DOWN, UP)), ("dot", r + 1, i)])
                               for (i, j), c in dd.items()]
            else:
                start = r
                corrections = [(-Z * c, [("dot", r + 1, i), ("cap", r), ("cup", r, (UP, DOWN)), ("dot", r, j)])
                               for (i, j), c in dd.items()]
            _, main = self.apply(w_r, op, self.dot_push(w_r, m_r, start, a))
            fixes = self.run_weighted(w_r, basis_state(m_r), corrections)
            return combine((main, None), (fixes, None))

        return self._memo("dot", (word, partner, p, a), compute)

    # --- op handlers ---

    def _apply_dot(self, word: Word, op: Op, partner: Matching, dots: DotVector) -> State:
        _, p, a = op
        if a == 0:
            return {(partner, dots): SYM_ONE}
        if word[p] == UP:
            moved = list(dots)
            moved[p] += a
            return {(partner, tuple(moved)): SYM_ONE}
        return add_top_dots(self.dot_push(word, partner, p, a), dots)

    def _apply_cup(self, word: Word, op: Op, partner: Matching, dots: DotVector) -> State:
        p = op[1]
        if tuple(op[2]) not in ((UP, DOWN), (DOWN, UP)):
            raise TypeMismatch(f"cup letters {op[2]}")
        return {(insert_cup(partner, p), dots[:p] + (0, 0) + dots[p:]): SYM_ONE}

    def _apply_cap(self, word: Word, op: Op, partner: Matching, dots: DotVector) -> State:
        p = op[1]
        if word[p] == word[p + 1]:
            raise TypeMismatch(f"cap on {word[p]}{word[p + 1]}", expected="UD or DU", found=word[p:p + 2])
        u, v = (p, p + 1) if word[p] == UP else (p + 1, p)
        rest = list(dots)
        rest[u] = 0
        rest = tuple(rest)
        if partner[p] == p + 1:
            orientation = CW if word[p] == UP else CCW
            theta = bubble_value(orientation, PLAIN, dots[u], self.k)
            w_out = drop_pair(word, p)
            return self.apply(w_out, ("bub", p, theta), {(remove_pair(partner, p), drop_pair(rest, p)): SYM_ONE})[1]
        if dots[u]:
            pushed = add_top_dots(self.dot_push(word, partner, v, dots[u]), rest)
            return self.apply(word, op, pushed)[1]
        return add_top_dots(self.pure_cap(word, partner, p), drop_pair(dots, p))

    def _apply_cross(self, word: Word, op: Op, partner: Matching, dots: DotVector) -> State:
        p = op[1]
        if p + 1 >= len(word):
            raise TypeMismatch(f"crossing at {p} on a word of length {len(word)}")
        dotted = [s for s in (p, p + 1) if word[s] == UP and dots[s]]
        if not dotted:
            return add_top_dots(self.pure_cross(word, partner, p), swap_word(dots, p))
        s = self._choose(dotted)
        a = dots[s]
        rest = list(dots)
        rest[s] = 0
        rest = tuple(rest)
        top = p + 1 if s == p else p
        w_out = swap_word(word, p)
        _, main = self.apply(w_out, ("dot", top, a), self.apply_basis(word, op, partner, rest))
        letters = (word[p], word[p + 1])
        dd = divided_difference(a)
        if letters == (UP, UP):
            sign = Z if s == p else -Z
            corrections = [(sign * c, [("dot", p, i), ("dot", p + 1, j)]) for (i, j), c in dd.items()]
        elif letters == (UP, DOWN):
            corrections = [(-Z * c, [("dot", p, j), ("cap", p), ("cup", p, (DOWN, UP)), ("dot", p + 1, i)])
                           for (i, j), c in dd.items()]
        else:
            corrections = [(Z * c, [("dot", p + 1, i), ("cap", p), ("cup", p, (UP, DOWN)), ("dot", p, j)])
                           for (i, j), c in dd.items()]
        fixes = self.run_weighted(word, {(partner, rest): SYM_ONE}, corrections)
        return combine((main, None), (fixes, None))

    def _apply_negative_cross(self, word: Word, op: Op, partner: Matching, dots: DotVector) -> State:
        p = op[1]
        positive = self.apply_basis(word, ("x", p), partner, dots)
        _, smooth = self.run(word, {(partner, dots): SYM_ONE}, smoothing_ops(word, p))
        return combine((positive, None), (smooth, -Z))

    def _apply_bubble(self, word: Word, op: Op, partner: Matching, dots: DotVector) -> State:
        _, region, theta = op
        pending: Dict[Tuple[Tuple[int, int], ...], SymSym] = {(): theta}
        for j in range(region, len(word)):
            moved: Dict[Tuple[Tuple[int, int], ...], SymSym] = {}
            for placed, value in pending.items():
                images = {0: value} if value.degree() == 0 else slide_across(value, word[j])
                for s, image in images.items():
                    key = placed + ((j, s),) if s else placed
                    total = moved.get(key)
                    moved[key] = image if total is None else total + image
            pending = {key: v for key, v in moved.items() if not v.is_zero()}
        out: State = {}
        for placed, value in pending.items():
            ops = [("dot", j, s) for j, s in placed]
            _, state = self.run(word, {(partner, dots): SYM_ONE}, ops)
            add_into(out, state, value)
        return out

    # --- diagrams ---

    def slice_op(self, s: Slice, offset: int) -> Op:
        """The engine op of one diagram slice, placed after `offset` bent letters."""
        p = s.position + offset
        if s.kind in (Gen.DOT_UP, Gen.DOT_DOWN):
            return ("dot", p, s.label)
        if s.kind == Gen.CROSS_POS:
            return ("x", p)
        if s.kind == Gen.CROSS_NEG:
            return ("xneg", p)
        if s.kind == Gen.CUP_RIGHT:
            return ("cup", p, (DOWN, UP))
        if s.kind == Gen.CUP_LEFT:
            return ("cup", p, (UP, DOWN))
        if s.kind in (Gen.CAP_RIGHT, Gen.CAP_LEFT):
            return ("cap", p)
        return ("bub", p, bubble_value(s.orientation, s.sign, s.label, self.k))

    def fold(self, diagram: Diagram) -> State:
        """Basis expansion of one diagram, bent into Hom(𝟙, X^∨ ⊗ Y)."""
        def compute() -> State:
            m = len(diagram.source)
            word, partner = nested_cups(diagram.source)
            state = basis_state(partner)
            ops = [self.slice_op(s, m) for s in diagram.slices]
            if self._rng is not None:
                ops = self.interchange(ops)
            for op in ops:
                if self.debug:
                    self._check_step(word, op, state)
                word, state = self.apply(word, op, state)
            return state

        return cache_manager.get_or_compute("normalize", (self._ns, diagram), compute)

    def interchange(self, ops: List[Op]) -> List[Op]:
        """Seeded reordering of ops on disjoint strands; the composite is unchanged."""
        ops = list(ops)
        for _ in range(2 * len(ops)):
            if len(ops) < 2:
                break
            i = self._rng.randrange(len(ops) - 1)
            swapped = commute_ops(ops[i], ops[i + 1])
            if swapped is not None:
                ops[i], ops[i + 1] = swapped
        return ops

    def _check_step(self, word: Word, op: Op, state: State) -> None:
        """No basis vector produced by an op exceeds the measure of the op on its lift."""
        out_word = op_output(word, op)
        for partner, dots in state:
            before = rewrite_measure(word, op, partner)
            for (result, _), _ in self.apply_basis(word, op, partner, dots).items():
                if not valid_matching(out_word, result):
                    raise NonTermination(f"{op[0]} at {op[1]} produced {result} from {partner}")
                after = (0, crossing_number(result), 0, 0, 0)
                if after > before:
                    raise NonTermination(f"{op[0]} at {op[1]} raised the measure {before} to {after}")

    def normalize(self, f: Morphism) -> "NormalForm":
        terms: State = {}
        try:
            for d, c in f.items():
                add_into(terms, self.fold(d), _invert_t(c) if f.twisted else c)
        except RecursionError as exc:
            raise NonTermination(f"rewrite recursion too deep at k={self.k}", self.budget) from exc
        if f.twisted:
            terms = {basis: _invert_t_sym(value) for basis, value in terms.items()}
        logger.debug("normalized %d diagrams to %d basis terms at k=%d (%d steps)",
                     len(f), len(terms), self.k, self.steps)
        return NormalForm(f.source, f.target, terms, self.k)


def _invert_t(c: Scalar) -> Scalar:
    return Scalar({(a, -b): v for (a, b), v in Scalar.coerce(c).items()})


def _invert_t_sym(value: SymSym) -> SymSym:
    return SymSym({key: _invert_t(c) for key, c in value.items()})


# --- normal forms ---

def _basis_text(partner: Matching, dots: DotVector) -> str:
    pairs = " ".join(f"{i}-{j}" for i, j in enumerate(partner) if i < j)
    marks = ",".join(f"x{i}^{a}" for i, a in enumerate(dots) if a)
    return f"<{pairs}{' | ' + marks if marks else ''}>"


class NormalForm:
    """Expansion of a morphism X -> Y in the lift basis, with Sym⊗Sym coefficients."""

    def __init__(self, source: ObjectWord, target: ObjectWord, terms: Optional[State] = None, k: int = 0):
        self.source = ObjectWord(source)
        self.target = ObjectWord(target)
        self.k = k
        self.terms: State = {basis: v for basis, v in (terms or {}).items() if not v.is_zero()}

    def items(self) -> List[Tuple[Basis, SymSym]]:
        return sorted(self.terms.items(), key=lambda kv: kv[0])

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def coefficient(self, partner: Matching, dots: Optional[DotVector] = None) -> SymSym:
        key = (tuple(partner), tuple(dots) if dots is not None else (0,) * len(partner))
        return self.terms.get(key, SymSym.zero())

    def scalar(self) -> SymSym:
        """Coefficient of the empty basis vector (for endomorphisms of 𝟙)."""
        return self.coefficient((), ())

    def _check(self, other: "NormalForm") -> None:
        if (self.source, self.target) != (other.source, other.target):
            raise TypeMismatch(f"normal forms {self.source}→{self.target} and {other.source}→{other.target}",
                               expected=(self.source, self.target), found=(other.source, other.target))

    def __eq__(self, other) -> bool:
        if not isinstance(other, NormalForm):
            return NotImplemented
        return (self.source, self.target, self.terms) == (other.source, other.target, other.terms)

    def __hash__(self):
        return hash((self.source, self.target, frozenset(self.terms.items())))

    def __add__(self, other: "NormalForm") -> "NormalForm":
        self._check(other)
        return NormalForm(self.source, self.target, combine((self.terms, None), (other.terms, None)), self.k)

    def __neg__(self) -> "NormalForm":
        return self.scale(-ONE)

    def __sub__(self, other: "NormalForm") -> "NormalForm":
        return self + (-other)

    def scale(self, c) -> "NormalForm":
        return NormalForm(self.source, self.target, combine((self.terms, c)), self.k)

    def render(self) -> str:
        if self.is_zero():
            return "0"
        return " + ".join(f"({render_sym(v)}) {_basis_text(*basis)}" for basis, v in self.items())

    def __repr__(self) -> str:
        return f"NormalForm({self.source}→{self.target}: {self.render()})"

    def to_dict(self) -> Dict:
        return {
            "source": self.source.code,
            "target": self.target.code,
            "k": self.k,
            "terms": [
                {"matching": list(partner), "dots": list(dots), "value": render_sym(v)}
                for (partner, dots), v in self.items()
            ],
        }


# --- lifts and embedding ---

_CROSSING_KIND = {(UP, UP): "up", (UP, DOWN): "right", (DOWN, UP): "left", (DOWN, DOWN): "down"}


def basis_matchings(source, target) -> List[Matching]:
    """Every matching of the bent boundary of X -> Y, in a fixed order."""
    return all_matchings(bent_word(ObjectWord(source), ObjectWord(target)))


def _lift_steps(word: Word, partner: Matching, offset: int) -> List[Step]:
    steps: List[Step] = []
    current: Word = ()
    for op in Engine.lift_ops(word, partner):
        p = op[1] + offset
        if op[0] == "cup":
            steps.append((Gen.CUP_RIGHT if tuple(op[2]) == (DOWN, UP) else Gen.CUP_LEFT, p))
        else:
            letters = (current[op[1]], current[op[1] + 1])
            steps.extend(crossing_steps(_CROSSING_KIND[letters], p, True))
        current = op_output(current, op)
    return steps


def _closing_caps(source: ObjectWord) -> List[Step]:
    m = len(source)
    return [(Gen.CAP_RIGHT if source[i] == UP else Gen.CAP_LEFT, i) for i in range(m - 1, -1, -1)]


def canonical_lift(partner: Matching, source, target) -> Diagram:
    """
    The basis diagram of a matching: the lift built in the bent picture, drawn to
    the right of X and closed off against X with caps.
    """
    source, target = ObjectWord(source), ObjectWord(target)
    word = bent_word(source, target)
    if not valid_matching(word, tuple(partner)):
        raise TypeMismatch(f"{tuple(partner)} is not a matching of {source}→{target}")
    m = len(source)
    return Diagram.build(source, _lift_steps(word, tuple(partner), m) + _closing_caps(source))


def lift_morphism(partner: Matching, source, target) -> Morphism:
    return Morphism.from_diagram(canonical_lift(partner, source, target))


def _coefficient_bubbles(key, k: int) -> Tuple[Scalar, List[Tuple[str, str, int]]]:
    """e_λ ⊗ e_μ as a scalar times a product of (+)/(-) bubbles."""
    scale = ONE
    bubbles = []
    for generator, parts in zip(("e⊗1", "1⊗e"), key):
        for n in parts:
            prefactor, orientation, sign, label = beta_dict(k, generator, n)
            scale = scale * prefactor
            bubbles.append((orientation, sign, label))
    return scale, bubbles


def embed(nf: NormalForm) -> Morphism:
    """Re-express a normal form as a morphism: lifts, terminal dots and right-edge bubbles."""
    source, target = nf.source, nf.target
    m = len(source)
    width = 2 * m + len(target)
    terms: Dict[Diagram, Scalar] = {}
    for (partner, dots), value in nf.items():
        word = bent_word(source, target)
        body = _lift_steps(word, partner, m)
        marks = [(Gen.DOT_UP, m + j, a) for j, a in enumerate(dots) if a]
        for key, c in value.items():
            scale, bubbles = _coefficient_bubbles(key, nf.k)
            spheres = [(Gen.BUBBLE, width, label, orientation, sign) for orientation, sign, label in bubbles]
            d = Diagram.build(source, body + marks + spheres + _closing_caps(source))
            terms[d] = terms.get(d, Scalar.zero()) + c * scale
    return Morphism(source, target, terms)


# --- entry points ---

def normalize(f: Morphism, k: int, budget: Optional[int] = None, seed: Optional[int] = None,
              debug: bool = False) -> NormalForm:
    """
    Basis expansion of f in Heis_k(z, t) (Heis_k(z, t^{-1}) for twisted morphisms).

    Args:
        f: morphism to straighten
        k: central charge
        budget: rewrite step limit; NonTermination when exhausted
        seed: randomise the free rule-application choices
        debug: check each folded slice
    """
    return Engine(k, budget, seed, debug).normalize(f)


def relation_residual(lhs: Morphism, rhs: Morphism, k: int, budget: Optional[int] = None,
                      seed: Optional[int] = None) -> NormalForm:
    return normalize(lhs - rhs, k, budget, seed)


def equal_mod_relations(a: Morphism, b: Morphism, k: int, budget: Optional[int] = None) -> bool:
    return relation_residual(a, b, k, budget).is_zero()


# --- confluence sampling ---

def random_morphism(rng: random.Random, max_strands: int = 4, max_crossings: int = 6,
                    max_bubbles: int = 2, labels: Sequence[int] = tuple(range(-3, 4)),
                    steps: int = 8, source: Optional[ObjectWord] = None) -> Morphism:
    """A random composite of generators on at most max_strands strands (or from `source`)."""
    if source is None:
        source = ObjectWord(rng.choice((UP, DOWN)) for _ in range(rng.randint(0, max_strands)))
    source = ObjectWord(source)
    word = list(source)
    chosen: List[Step] = []
    crossings = bubbles = 0
    for _ in range(steps):
        moves = []
        ups = [p for p in range(len(word) - 1) if word[p] == word[p + 1] == UP]
        if ups and crossings < max_crossings:
            moves.append("cross")
        if word:
            moves.append("dot")
        if bubbles < max_bubbles:
            moves.append("bubble")
        if len(word) + 2 <= max_strands:
            moves.append("cup")
        caps = [p for p in range(len(word) - 1) if word[p] != word[p + 1]]
        if caps:
            moves.append("cap")
        move = rng.choice(moves)
        if move == "cross":
            chosen.append((rng.choice((Gen.CROSS_POS, Gen.CROSS_NEG)), rng.choice(ups)))
            crossings += 1
        elif move == "dot":
            p = rng.randrange(len(word))
            chosen.append((Gen.DOT_UP if word[p] == UP else Gen.DOT_DOWN, p, rng.choice(labels)))
        elif move == "bubble":
            sign = rng.choice((PLAIN, PLUS, MINUS))
            chosen.append((Gen.BUBBLE, rng.randrange(len(word) + 1), rng.choice(labels),
                           rng.choice((CW, CCW)), sign))
            bubbles += 1
        elif move == "cup":
            p = rng.randrange(len(word) + 1)
            kind = rng.choice((Gen.CUP_RIGHT, Gen.CUP_LEFT))
            chosen.append((kind, p))
            word[p:p] = [DOWN, UP] if kind == Gen.CUP_RIGHT else [UP, DOWN]
        else:
            p = rng.choice(caps)
            chosen.append((Gen.CAP_RIGHT if word[p] == UP else Gen.CAP_LEFT, p))
            del word[p:p + 2]
    return Morphism.from_steps(source, chosen)


def confluence_mismatches(k: int, samples: int, seed: int, budget: Optional[int] = None,
                          **shape) -> List[str]:
    """
    Normalize random diagrams under two independently seeded rule orders.

    Returns:
        Renderings of the diagrams whose two normal forms differ
    """
    rng = random.Random(seed)
    mismatches = []
    for i in range(samples):
        f = random_morphism(rng, **shape)
        a = normalize(f, k, budget, seed=rng.randrange(1 << 30))
        b = normalize(f, k, budget, seed=rng.randrange(1 << 30))
        if a != b:
            logger.warning("Rule order changed the normal form of sample %d at k=%d", i, k)
            mismatches.append(render(f))
    return mismatches


def functoriality_mismatches(k: int, pairs: int, seed: int, budget: Optional[int] = None,
                             **shape) -> List[str]:
    """
    normalize(f∘g) against normalizing f and g, embedding, composing and normalizing again.

    Returns:
        Renderings of the composites whose two normal forms differ
    """
    rng = random.Random(seed)
    mismatches = []
    for i in range(pairs):
        g = random_morphism(rng, **shape)
        f = random_morphism(rng, source=g.target, **shape)
        direct = normalize(compose(f, g), k, budget)
        staged = normalize(compose(embed(normalize(f, k, budget)), embed(normalize(g, k, budget))), k, budget)
        if direct != staged:
            logger.warning("Composition changed the normal form of pair %d at k=%d", i, k)
            mismatches.append(render(compose(f, g)))
    return mismatches
