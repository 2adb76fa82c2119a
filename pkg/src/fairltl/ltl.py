"""LTL syntax trees, parsing, printing, normal forms and lasso semantics.

Formulas are immutable frozen dataclasses.  The normalized universe is
positive normal form (negation only on atoms); :class:`Not` and
:class:`Implies` only occur in raw parse trees before :func:`to_pnf`.
"""
from __future__ import annotations

import enum
import random
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional, Sequence


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return to_string(self)

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)


@dataclass(frozen=True, slots=True, repr=False)
class Atom(Formula):
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True, slots=True, repr=False)
class NegAtom(Formula):
    name: str

    def __repr__(self):
        return "!" + self.name


@dataclass(frozen=True, slots=True, repr=False)
class TrueF(Formula):
    def __repr__(self):
        return "true"


@dataclass(frozen=True, slots=True, repr=False)
class FalseF(Formula):
    def __repr__(self):
        return "false"


TRUE = TrueF()
FALSE = FalseF()


@dataclass(frozen=True, slots=True, repr=False)
class And(Formula):
    lhs: Formula
    rhs: Formula

    def __repr__(self):
        return to_string(self)


@dataclass(frozen=True, slots=True, repr=False)
class Or(Formula):
    lhs: Formula
    rhs: Formula

    def __repr__(self):
        return to_string(self)


@dataclass(frozen=True, slots=True, repr=False)
class Next(Formula):
    sub: Formula

    def __repr__(self):
        return to_string(self)


@dataclass(frozen=True, slots=True, repr=False)
class Until(Formula):
    lhs: Formula
    rhs: Formula

    def __repr__(self):
        return to_string(self)


@dataclass(frozen=True, slots=True, repr=False)
class WeakUntil(Formula):
    lhs: Formula
    rhs: Formula

    def __repr__(self):
        return to_string(self)


@dataclass(frozen=True, slots=True, repr=False)
class Finally(Formula):
    sub: Formula

    def __repr__(self):
        return to_string(self)


@dataclass(frozen=True, slots=True, repr=False)
class Globally(Formula):
    sub: Formula

    def __repr__(self):
        return to_string(self)


# raw-only constructors


@dataclass(frozen=True, slots=True, repr=False)
class Not(Formula):
    sub: Formula

    def __repr__(self):
        return to_string(self)


@dataclass(frozen=True, slots=True, repr=False)
class Implies(Formula):
    lhs: Formula
    rhs: Formula

    def __repr__(self):
        return to_string(self)


LITERALS = (Atom, NegAtom, TrueF, FalseF)
UNARY = (Next, Finally, Globally, Not)
BINARY = (And, Or, Until, WeakUntil, Implies)


def children(phi: Formula) -> tuple:
    if isinstance(phi, UNARY):
        return (phi.sub,)
    if isinstance(phi, BINARY):
        return (phi.lhs, phi.rhs)
    return ()


def rebuild(phi: Formula, kids: Sequence[Formula]) -> Formula:
    """Return ``phi`` with its children replaced (same constructor)."""
    if isinstance(phi, UNARY):
        return type(phi)(kids[0])
    if isinstance(phi, BINARY):
        return type(phi)(kids[0], kids[1])
    return phi


def size(phi: Formula) -> int:
    """Number of nodes in the syntax tree."""
    n = 0
    stack = [phi]
    while stack:
        f = stack.pop()
        n += 1
        stack.extend(children(f))
    return n


def atoms(phi: Formula) -> frozenset:
    out = set()
    stack = [phi]
    while stack:
        f = stack.pop()
        if isinstance(f, (Atom, NegAtom)):
            out.add(f.name)
        stack.extend(children(f))
    return frozenset(out)


def is_propositional(phi: Formula) -> bool:
    if isinstance(phi, LITERALS):
        return True
    if isinstance(phi, (And, Or)):
        return is_propositional(phi.lhs) and is_propositional(phi.rhs)
    if isinstance(phi, Not):
        return is_propositional(phi.sub)
    if isinstance(phi, Implies):
        return is_propositional(phi.lhs) and is_propositional(phi.rhs)
    return False


def has_node(phi: Formula, kinds) -> bool:
    stack = [phi]
    while stack:
        f = stack.pop()
        if isinstance(f, kinds):
            return True
        stack.extend(children(f))
    return False


def conj(items: Iterable[Formula]) -> Formula:
    """Left-nested conjunction; the empty conjunction is ``true``."""
    out = None
    for it in items:
        out = it if out is None else And(out, it)
    return TRUE if out is None else out


def disj(items: Iterable[Formula]) -> Formula:
    out = None
    for it in items:
        out = it if out is None else Or(out, it)
    return FALSE if out is None else out


def conjuncts(phi: Formula) -> list:
    if isinstance(phi, And):
        return conjuncts(phi.lhs) + conjuncts(phi.rhs)
    return [phi]


def disjuncts(phi: Formula) -> list:
    if isinstance(phi, Or):
        return disjuncts(phi.lhs) + disjuncts(phi.rhs)
    return [phi]


def ac_key(phi: Formula):
    """Canonical key modulo associativity/commutativity of ``&`` and ``|``."""
    if isinstance(phi, And):
        return ("&", tuple(sorted((ac_key(c) for c in conjuncts(phi)), key=repr)))
    if isinstance(phi, Or):
        return ("|", tuple(sorted((ac_key(c) for c in disjuncts(phi)), key=repr)))
    if isinstance(phi, LITERALS):
        return (type(phi).__name__, getattr(phi, "name", ""))
    return (type(phi).__name__,) + tuple(ac_key(c) for c in children(phi))


def equal_modulo_ac(phi: Formula, psi: Formula) -> bool:
    return ac_key(phi) == ac_key(psi)


# ---------------------------------------------------------------------------
# parsing

class LTLSyntaxError(SyntaxError):
    """Malformed formula text.  ``offset`` is a byte offset into the input."""

    def __init__(self, message: str, offset: int, expected: Iterable[str] = ()):
        super().__init__(message)
        self.msg = message
        self.offset = offset
        self.expected = frozenset(expected)

    def __str__(self):
        exp = ", ".join(sorted(self.expected))
        tail = f" (expected one of: {exp})" if exp else ""
        return f"{self.msg} at byte {self.offset}{tail}"


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<arrow>->)|(?P<ident>[a-z][A-Za-z0-9_]*)|(?P<op>[()!&|XFGUW]))"
)
_KEYWORDS = {"true", "false"}
_UNARY_TOKENS = {"!": Not, "X": Next, "F": Finally, "G": Globally}
_PRIMARY_START = {"(", "!", "X", "F", "G", "true", "false", "<identifier>"}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = []  # (kind, value, byte_offset)
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN_RE.match(text, pos)
            if not m:
                bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
                raise LTLSyntaxError(
                    f"unexpected character {text[bad]!r}", self._byte(bad), _PRIMARY_START
                )
            start = m.start(m.lastgroup)
            value = m.group(m.lastgroup)
            kind = m.lastgroup
            if kind == "ident" and value in _KEYWORDS:
                kind = "kw"
            self.tokens.append((kind, value, self._byte(start)))
            pos = m.end()
        self.end = self._byte(len(text))
        self.i = 0

    def _byte(self, idx: int) -> int:
        return len(self.text[:idx].encode("utf-8"))

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def fail(self, expected):
        tok = self.peek()
        if tok is None:
            raise LTLSyntaxError("unexpected end of input", self.end, expected)
        raise LTLSyntaxError(f"unexpected token {tok[1]!r}", tok[2], expected)

    def parse(self) -> Formula:
        if not self.tokens:
            raise LTLSyntaxError("empty formula", 0, _PRIMARY_START)
        phi = self.implication()
        if self.peek() is not None:
            self.fail({"->", "|", "&", "U", "W", "<end>"})
        return phi

    def implication(self):
        lhs = self.disjunction()
        tok = self.peek()
        if tok and tok[1] == "->":
            self.take()
            return Implies(lhs, self.implication())
        return lhs

    def disjunction(self):
        phi = self.conjunction()
        while (tok := self.peek()) and tok[1] == "|":
            self.take()
            phi = Or(phi, self.conjunction())
        return phi

    def conjunction(self):
        phi = self.until()
        while (tok := self.peek()) and tok[1] == "&":
            self.take()
            phi = And(phi, self.until())
        return phi

    def until(self):
        lhs = self.unary()
        tok = self.peek()
        if tok and tok[1] in ("U", "W"):
            self.take()
            rhs = self.until()
            return Until(lhs, rhs) if tok[1] == "U" else WeakUntil(lhs, rhs)
        return lhs

    def unary(self):
        tok = self.peek()
        if tok and tok[0] == "op" and tok[1] in _UNARY_TOKENS:
            self.take()
            sub = self.unary()
            if tok[1] == "!" and isinstance(sub, Atom):
                return NegAtom(sub.name)
            return _UNARY_TOKENS[tok[1]](sub)
        return self.primary()

    def primary(self):
        tok = self.peek()
        if tok is None:
            self.fail(_PRIMARY_START)
        kind, value, _ = tok
        if kind == "ident":
            self.take()
            return Atom(value)
        if kind == "kw":
            self.take()
            return TRUE if value == "true" else FALSE
        if value == "(":
            self.take()
            phi = self.implication()
            tok = self.peek()
            if tok is None or tok[1] != ")":
                self.fail({")"})
            self.take()
            return phi
        self.fail(_PRIMARY_START)


def parse(text: str) -> Formula:
    """Parse formula text into a raw tree (may contain Not/Implies).

    ``!`` applied directly to an identifier yields a :class:`NegAtom`.

    Precedence, tightest first: ``! X F G``, then ``U W`` (right
    associative), ``&``, ``|``, ``->`` (right associative).
    """
    return _Parser(text).parse()


def parse_pnf(text: str) -> Formula:
    return to_pnf(parse(text))


# ---------------------------------------------------------------------------
# printing

_PREC = {Implies: 1, Or: 2, And: 3, Until: 4, WeakUntil: 4}
_SYM = {Implies: "->", Or: "|", And: "&", Until: "U", WeakUntil: "W"}
_USYM = {Next: "X", Finally: "F", Globally: "G", Not: "!"}


def _prec(phi: Formula) -> int:
    if isinstance(phi, LITERALS):
        return 6
    if isinstance(phi, UNARY):
        return 5
    return _PREC[type(phi)]


def to_string(phi: Formula, full_parens: bool = False) -> str:
    """Render ``phi``; precedence-minimal unless ``full_parens``."""
    if isinstance(phi, Atom):
        return phi.name
    if isinstance(phi, NegAtom):
        return "!" + phi.name
    if isinstance(phi, TrueF):
        return "true"
    if isinstance(phi, FalseF):
        return "false"
    if isinstance(phi, UNARY):
        sub = to_string(phi.sub, full_parens)
        if not full_parens and _prec(phi.sub) < 5:
            sub = f"({sub})"
        if isinstance(phi, Not) and isinstance(phi.sub, LITERALS):
            return "!" + sub
        return f"{_USYM[type(phi)]} {sub}"
    p = _PREC[type(phi)]
    right_assoc = isinstance(phi, (Implies, Until, WeakUntil))
    lhs = to_string(phi.lhs, full_parens)
    rhs = to_string(phi.rhs, full_parens)
    if not full_parens:
        lp, rp = _prec(phi.lhs), _prec(phi.rhs)
        if lp < p or (lp == p and right_assoc):
            lhs = f"({lhs})"
        if rp < p or (rp == p and not right_assoc):
            rhs = f"({rhs})"
        return f"{lhs} {_SYM[type(phi)]} {rhs}"
    return f"({lhs} {_SYM[type(phi)]} {rhs})"


# ---------------------------------------------------------------------------
# normal forms

def to_pnf(phi: Formula, negated: bool = False) -> Formula:
    """Push negations to the atoms (positive normal form)."""
    if isinstance(phi, Atom):
        return NegAtom(phi.name) if negated else phi
    if isinstance(phi, NegAtom):
        return Atom(phi.name) if negated else phi
    if isinstance(phi, TrueF):
        return FALSE if negated else TRUE
    if isinstance(phi, FalseF):
        return TRUE if negated else FALSE
    if isinstance(phi, Not):
        return to_pnf(phi.sub, not negated)
    if isinstance(phi, Implies):
        return to_pnf(Or(Not(phi.lhs), phi.rhs), negated)
    if isinstance(phi, And):
        op = Or if negated else And
        return op(to_pnf(phi.lhs, negated), to_pnf(phi.rhs, negated))
    if isinstance(phi, Or):
        op = And if negated else Or
        return op(to_pnf(phi.lhs, negated), to_pnf(phi.rhs, negated))
    if isinstance(phi, Next):
        return Next(to_pnf(phi.sub, negated))
    if isinstance(phi, Finally):
        return Globally(to_pnf(phi.sub, True)) if negated else Finally(to_pnf(phi.sub))
    if isinstance(phi, Globally):
        return Finally(to_pnf(phi.sub, True)) if negated else Globally(to_pnf(phi.sub))
    if isinstance(phi, (Until, WeakUntil)):
        a, b = phi.lhs, phi.rhs
        if not negated:
            return type(phi)(to_pnf(a), to_pnf(b))
        # !(a U b) == (a & !b) W (!a & !b); dually for W
        dual = WeakUntil if isinstance(phi, Until) else Until
        return dual(And(to_pnf(a), to_pnf(b, True)), And(to_pnf(a, True), to_pnf(b, True)))
    raise TypeError(f"not a formula: {phi!r}")


def negate(phi: Formula) -> Formula:
    return to_pnf(Not(phi))


def simplify(phi: Formula) -> Formula:
    """Light, semantics-preserving cleanup: constant absorption, duplicate
    literals, ``FF``/``GG`` collapse.  No flattening or reordering."""
    if isinstance(phi, LITERALS):
        return phi
    kids = [simplify(c) for c in children(phi)]
    if isinstance(phi, And):
        a, b = kids
        if a == FALSE or b == FALSE:
            return FALSE
        if a == TRUE:
            return b
        if b == TRUE:
            return a
        if a == b and isinstance(a, LITERALS):
            return a
        if isinstance(a, (Atom, NegAtom)) and isinstance(b, (Atom, NegAtom)) \
                and a.name == b.name:
            return FALSE
        return And(a, b)
    if isinstance(phi, Or):
        a, b = kids
        if a == TRUE or b == TRUE:
            return TRUE
        if a == FALSE:
            return b
        if b == FALSE:
            return a
        if a == b and isinstance(a, LITERALS):
            return a
        if isinstance(a, (Atom, NegAtom)) and isinstance(b, (Atom, NegAtom)) \
                and a.name == b.name:
            return TRUE
        return Or(a, b)
    if isinstance(phi, Next):
        (a,) = kids
        return a if isinstance(a, (TrueF, FalseF)) else Next(a)
    if isinstance(phi, Finally):
        (a,) = kids
        if isinstance(a, (TrueF, FalseF, Finally)):
            return a
        return Finally(a)
    if isinstance(phi, Globally):
        (a,) = kids
        if isinstance(a, (TrueF, FalseF, Globally)):
            return a
        return Globally(a)
    if isinstance(phi, Until):
        a, b = kids
        if isinstance(b, (TrueF, FalseF)):
            return b
        if a == FALSE:
            return b
        if a == TRUE:
            return simplify(Finally(b))
        return Until(a, b)
    if isinstance(phi, WeakUntil):
        a, b = kids
        if b == TRUE or a == TRUE:
            return TRUE
        if a == FALSE:
            return b
        if b == FALSE:
            return simplify(Globally(a))
        return WeakUntil(a, b)
    return rebuild(phi, kids)


def eliminate_w(phi: Formula) -> Formula:
    """Rewrite every ``a W b`` bottom-up as ``G a | (a U b)``."""
    if isinstance(phi, LITERALS):
        return phi
    kids = [eliminate_w(c) for c in children(phi)]
    if isinstance(phi, WeakUntil):
        a, b = kids
        return simplify(Or(Globally(a), Until(a, b)))
    return simplify(rebuild(phi, kids))


# ---------------------------------------------------------------------------
# fragments

class Fragment(enum.Enum):
    PROPOSITIONAL = "Propositional"
    LTL_FG = "LTL(F,G)"
    LTL_UX = "LTL(U,X)"
    FULL = "FullLTL"

    def __str__(self):
        return self.value


def classify_fragment(phi: Formula) -> Fragment:
    fg = has_node(phi, (Finally, Globally))
    ux = has_node(phi, (Until, Next))
    if has_node(phi, (WeakUntil, Not, Implies)) and not is_propositional(phi):
        return Fragment.FULL
    if not fg and not ux:
        return Fragment.PROPOSITIONAL
    if fg and not ux:
        return Fragment.LTL_FG
    if ux and not fg:
        return Fragment.LTL_UX
    return Fragment.FULL


# ---------------------------------------------------------------------------
# lasso words and exact satisfaction

def _letter(x) -> frozenset:
    if isinstance(x, str):
        return frozenset(x.split()) if " " in x else (frozenset([x]) if x else frozenset())
    return frozenset(x)


@dataclass(frozen=True)
class LassoWord:
    """The infinite word ``prefix . loop^omega`` over letters (sets of atoms)."""

    prefix: tuple
    loop: tuple

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(_letter(x) for x in self.prefix))
        object.__setattr__(self, "loop", tuple(_letter(x) for x in self.loop))
        if not self.loop:
            raise ValueError("lasso loop must be nonempty")

    def __len__(self):
        return len(self.prefix) + len(self.loop)

    def letter(self, i: int) -> frozenset:
        p = len(self.prefix)
        if i < p:
            return self.prefix[i]
        return self.loop[(i - p) % len(self.loop)]

    def __str__(self):
        def fmt(letters):
            return "".join("{" + ",".join(sorted(x)) + "}" for x in letters)
        return f"{fmt(self.prefix)}({fmt(self.loop)})^w"

    @classmethod
    def random(cls, rng: random.Random, ap: Sequence[str], max_prefix: int = 6,
               max_loop: int = 6, min_prefix: int = 0) -> "LassoWord":
        ap = list(ap)

        def letter():
            return frozenset(a for a in ap if rng.random() < 0.5)

        prefix = [letter() for _ in range(rng.randint(min_prefix, max_prefix))]
        loop = [letter() for _ in range(rng.randint(1, max_loop))]
        return cls(tuple(prefix), tuple(loop))


def _postorder(phi: Formula) -> list:
    order, index = [], {}

    def visit(f):
        if f in index:
            return index[f]
        ks = tuple(visit(c) for c in children(f))
        index[f] = len(order)
        order.append((f, ks))
        return index[f]

    visit(phi)
    return order


@lru_cache(maxsize=4096)
def _compile(phi: Formula) -> tuple:
    prog = []
    for f, ks in _postorder(phi):
        if isinstance(f, Atom):
            prog.append(("ap", f.name))
        elif isinstance(f, NegAtom):
            prog.append(("nap", f.name))
        elif isinstance(f, TrueF):
            prog.append(("T",))
        elif isinstance(f, FalseF):
            prog.append(("F0",))
        else:
            prog.append((type(f).__name__,) + ks)
    return tuple(prog)


def eval_lasso(w: LassoWord, phi: Formula) -> bool:
    """Exact truth of ``w |= phi`` (raw Not/Implies are also accepted).

    Every subformula is evaluated as a bitmask over the ``len(w)`` distinct
    positions; position ``len(w)-1`` steps back to the loop start.  U/F take
    least fixpoints, W/G greatest fixpoints.
    """
    return bool(_eval_masks(w, _compile(phi))[-1] & 1)


def positions_satisfying(w: LassoWord, phi: Formula) -> list:
    mask = _eval_masks(w, _compile(phi))[-1]
    return [i for i in range(len(w)) if mask >> i & 1]


def _eval_masks(w: LassoWord, prog: tuple) -> list:
    n = len(w)
    ls = len(w.prefix)
    full = (1 << n) - 1
    top = n - 1
    letters = w.prefix + w.loop

    def shift(v):
        return (v >> 1) | (((v >> ls) & 1) << top)

    def lfp(v1, v2):
        val = v2
        while True:
            new = v2 | (v1 & shift(val))
            if new == val:
                return val
            val = new

    def gfp(v1, v2):
        val = full
        while True:
            new = v2 | (v1 & shift(val))
            if new == val:
                return val
            val = new

    ap_cache = {}

    def ap_mask(name):
        m = ap_cache.get(name)
        if m is None:
            m = 0
            for i, letter in enumerate(letters):
                if name in letter:
                    m |= 1 << i
            ap_cache[name] = m
        return m

    vals = []
    for ins in prog:
        op = ins[0]
        if op == "ap":
            v = ap_mask(ins[1])
        elif op == "nap":
            v = full & ~ap_mask(ins[1])
        elif op == "T":
            v = full
        elif op == "F0":
            v = 0
        elif op == "And":
            v = vals[ins[1]] & vals[ins[2]]
        elif op == "Or":
            v = vals[ins[1]] | vals[ins[2]]
        elif op == "Not":
            v = full & ~vals[ins[1]]
        elif op == "Implies":
            v = (full & ~vals[ins[1]]) | vals[ins[2]]
        elif op == "Next":
            v = shift(vals[ins[1]])
        elif op == "Until":
            v = lfp(vals[ins[1]], vals[ins[2]])
        elif op == "WeakUntil":
            v = gfp(vals[ins[1]], vals[ins[2]])
        elif op == "Finally":
            v = lfp(full, vals[ins[1]])
        elif op == "Globally":
            v = gfp(vals[ins[1]], 0)
        else:  # pragma: no cover
            raise TypeError(op)
        vals.append(v)
    return vals


def eval_prop(phi: Formula, letter: frozenset) -> bool:
    """Truth of a propositional formula on one letter."""
    if isinstance(phi, Atom):
        return phi.name in letter
    if isinstance(phi, NegAtom):
        return phi.name not in letter
    if isinstance(phi, TrueF):
        return True
    if isinstance(phi, FalseF):
        return False
    if isinstance(phi, And):
        return eval_prop(phi.lhs, letter) and eval_prop(phi.rhs, letter)
    if isinstance(phi, Or):
        return eval_prop(phi.lhs, letter) or eval_prop(phi.rhs, letter)
    if isinstance(phi, Not):
        return not eval_prop(phi.sub, letter)
    if isinstance(phi, Implies):
        return (not eval_prop(phi.lhs, letter)) or eval_prop(phi.rhs, letter)
    raise ValueError(f"not propositional: {phi}")


# ---------------------------------------------------------------------------
# bounded fairness screen

class FairnessScreen(enum.Enum):
    CONFIRMED_NOT = "ConfirmedNot"
    NOT_REFUTED = "NotRefuted"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ScreenResult:
    status: FairnessScreen
    counterexample: Optional[LassoWord] = None
    samples: int = 0

    @property
    def refuted(self) -> bool:
        return self.status is FairnessScreen.CONFIRMED_NOT


def is_fairness_bounded(phi: Formula, samples: int = 200, max_len: int = 6,
                        seed: Optional[int] = 0) -> ScreenResult:
    """Look for a lasso on which ``phi`` disagrees with ``G phi`` or ``F phi``.

    A hit proves ``phi`` is not a fairness.  ``NOT_REFUTED`` is not a proof
    that it is one.
    """
    rng = random.Random(seed)
    ap = sorted(atoms(phi)) or ["p"]
    g, f = Globally(phi), Finally(phi)
    for i in range(samples):
        w = LassoWord.random(rng, ap, max_prefix=max_len, max_loop=max_len)
        v = eval_lasso(w, phi)
        if v != eval_lasso(w, g) or v != eval_lasso(w, f):
            return ScreenResult(FairnessScreen.CONFIRMED_NOT, w, i + 1)
    return ScreenResult(FairnessScreen.NOT_REFUTED, None, samples)
