"""Fair normal forms: the flatten operator and the general transformation.

Internally, a single ``F`` in a flattened clause stands for ``G F`` and a
single ``G`` for ``F G``; on purely periodic words the two readings agree,
and on fairness formulas that agreement lifts to full equivalence.

The rewriting works on a clause representation:

* a DNF is a list of :class:`_Conj` clauses ``(p, f, g)`` meaning
  ``/\\p & /\\{F x | x in f} & G(/\\g)``;
* a CNF is a list of :class:`_Disj` clauses ``(p, f, g)`` meaning
  ``\\/p | \\/{F x | x in f} | \\/{G y | y in g}``.

Leaves (``p`` elements and the operands under F/G) are maximal F/G-free
subtrees, kept opaque.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

from .ltl import (
    FALSE, TRUE, And, Atom, FalseF, Finally, Formula, Fragment, Globally,
    NegAtom, Next, Or, TrueF, Until, WeakUntil, classify_fragment, conj,
    conjuncts, disj, disjuncts, eliminate_w, has_node, is_propositional,
    parse_pnf, simplify, size, to_string,
)

DEFAULT_SIZE_CAP = 100_000


class SizeCapExceeded(Exception):
    def __init__(self, current_size: int, cap: int):
        super().__init__(f"intermediate formula size {current_size} exceeds cap {cap}")
        self.current_size = current_size
        self.cap = cap


class PreconditionViolation(ValueError):
    pass


_size = lru_cache(maxsize=1 << 16)(size)


def _key(phi: Formula):
    return (_size(phi), to_string(phi))


def _sorted(items) -> list:
    return sorted(items, key=_key)


def _temporal_free(phi: Formula) -> bool:
    return not has_node(phi, (Finally, Globally))


# ---------------------------------------------------------------------------
# smart constructors with local constant folding

def _and(a: Formula, b: Formula) -> Formula:
    if a == FALSE or b == FALSE:
        return FALSE
    if a == TRUE:
        return b
    if b == TRUE:
        return a
    if a == b and isinstance(a, (Atom, NegAtom)):
        return a
    return And(a, b)


def _or(a: Formula, b: Formula) -> Formula:
    if a == TRUE or b == TRUE:
        return TRUE
    if a == FALSE:
        return b
    if b == FALSE:
        return a
    if a == b and isinstance(a, (Atom, NegAtom)):
        return a
    return Or(a, b)


def _and_all(items) -> Formula:
    out = TRUE
    for it in items:
        out = _and(out, it)
    return out


def _or_all(items) -> Formula:
    out = FALSE
    for it in items:
        out = _or(out, it)
    return out


# ---------------------------------------------------------------------------
# clause sets

def _complementary(items) -> bool:
    pos = {x.name for x in items if isinstance(x, Atom)}
    return any(isinstance(x, NegAtom) and x.name in pos for x in items)


def _absorb(items: frozenset, weaker) -> frozenset:
    """Drop elements of kind ``weaker`` (Or for conjunctive sets, And for
    disjunctive ones) that have one of their operands already present."""
    split = disjuncts if weaker is Or else conjuncts
    keep = set()
    for x in items:
        if isinstance(x, weaker) and any(y in items for y in split(x) if y != x):
            continue
        keep.add(x)
    return frozenset(keep)


@dataclass(frozen=True)
class _Conj:
    p: frozenset = frozenset()
    f: frozenset = frozenset()
    g: frozenset = frozenset()

    def weight(self) -> int:
        return 1 + sum(_size(x) + 1 for part in (self.p, self.f, self.g) for x in part)

    def subsumes(self, other: "_Conj") -> bool:
        return self.p <= other.p and self.f <= other.f and self.g <= other.g


@dataclass(frozen=True)
class _Disj:
    p: frozenset = frozenset()
    f: frozenset = frozenset()
    g: frozenset = frozenset()

    def weight(self) -> int:
        return 1 + sum(_size(x) + 1 for part in (self.p, self.f, self.g) for x in part)

    def subsumes(self, other: "_Disj") -> bool:
        return self.p <= other.p and self.f <= other.f and self.g <= other.g


def _mk_conj(p=(), f=(), g=()) -> Optional[_Conj]:
    """Normalized conjunctive clause, or None when it is false."""
    p = {y for x in p for y in conjuncts(x)}
    g = {y for x in g for y in conjuncts(x)}
    f = set(f)
    for part in (p, f, g):
        if FALSE in part:
            return None
        part.discard(TRUE)
    if _complementary(p) or _complementary(g):
        return None
    return _Conj(_absorb(frozenset(p), Or), _absorb(frozenset(f), Or), _absorb(frozenset(g), Or))


def _mk_disj(p=(), f=(), g=()) -> Optional[_Disj]:
    """Normalized disjunctive clause, or None when it is true."""
    p = {y for x in p for y in disjuncts(x)}
    f, g = set(f), set(g)
    for part in (p, f, g):
        if TRUE in part:
            return None
        part.discard(FALSE)
    if _complementary(p):
        return None
    return _Disj(_absorb(frozenset(p), And), _absorb(frozenset(f), And), _absorb(frozenset(g), And))


def _reduce(clauses: list) -> list:
    """Deduplicate and drop clauses subsumed by another (order-preserving)."""
    uniq = list(dict.fromkeys(c for c in clauses if c is not None))
    keep = []
    for i, c in enumerate(uniq):
        if any(j != i and d.subsumes(c) for j, d in enumerate(uniq)):
            continue
        keep.append(c)
    return keep


class _Budget:
    def __init__(self, cap: int):
        self.cap = cap
        self.peak = 0

    def check(self, clauses) -> list:
        total = sum(c.weight() for c in clauses)
        self.peak = max(self.peak, total)
        if total > self.cap:
            raise SizeCapExceeded(total, self.cap)
        return clauses

    def note(self, phi: Formula) -> Formula:
        n = _size(phi)
        self.peak = max(self.peak, n)
        if n > self.cap:
            raise SizeCapExceeded(n, self.cap)
        return phi


def _conj_product(xs: list, ys: list, budget: _Budget) -> list:
    out = []
    for x in xs:
        for y in ys:
            out.append(_mk_conj(x.p | y.p, x.f | y.f, x.g | y.g))
            if len(out) % 256 == 0:
                budget.check([c for c in out if c is not None])
    return budget.check(_reduce(out))


def _disj_product(xs: list, ys: list, budget: _Budget) -> list:
    out = []
    for x in xs:
        for y in ys:
            out.append(_mk_disj(x.p | y.p, x.f | y.f, x.g | y.g))
            if len(out) % 256 == 0:
                budget.check([c for c in out if c is not None])
    return budget.check(_reduce(out))


def _dnf_to_cnf(dnf: list, budget: _Budget) -> list:
    cnf = [_Disj()]  # the empty disjunction: false
    for c in dnf:
        items = ([_mk_disj(p=[x]) for x in _sorted(c.p)]
                 + [_mk_disj(f=[x]) for x in _sorted(c.f)]
                 + [_mk_disj(g=[x]) for x in _sorted(c.g)])
        items = [d for d in items if d is not None]
        if not items:
            return []  # an empty clause is true, and so is the whole DNF
        cnf = _disj_product(cnf, items, budget)
    return cnf


def _flat_f(c: _Conj) -> Optional[_Conj]:
    if not c.p:
        return c
    return _mk_conj(f=c.f | {_and_all(_sorted(c.p))}, g=c.g)


def _flat_g(d: _Disj) -> list:
    out = []
    if d.p:
        out.append(_mk_conj(g=[_or_all(_sorted(d.p))]))
    out += [_mk_conj(f=[x]) for x in _sorted(d.f)]
    out += [_mk_conj(g=[y]) for y in _sorted(d.g)]
    return _reduce(out)


def _flatten(phi: Formula, budget: _Budget, trace: list) -> list:
    if _temporal_free(phi):
        c = _mk_conj(p=[phi])
        return [] if c is None else [c]
    if isinstance(phi, Or):
        return budget.check(_reduce(_flatten(phi.lhs, budget, trace) + _flatten(phi.rhs, budget, trace)))
    if isinstance(phi, And):
        return _conj_product(_flatten(phi.lhs, budget, trace), _flatten(phi.rhs, budget, trace), budget)
    if isinstance(phi, Finally):
        trace.append(f"flat_F: {to_string(phi)}")
        return budget.check(_reduce([_flat_f(c) for c in _flatten(phi.sub, budget, trace)]))
    if isinstance(phi, Globally):
        trace.append(f"flat_G: {to_string(phi)}")
        cnf = _dnf_to_cnf(_flatten(phi.sub, budget, trace), budget)
        out = [_Conj()]
        for d in cnf:
            out = _conj_product(out, _flat_g(d), budget)
        return out
    raise PreconditionViolation(f"F/G nested under {type(phi).__name__}: {to_string(phi)}")


def _flatten_top(phi: Formula, budget: _Budget, trace: list) -> list:
    dnf = _flatten(phi, budget, trace)
    if isinstance(phi, (Finally, Globally)):
        trace.append("leading GF elided: top operator is F or G")
        return dnf
    trace.append("leading GF added")
    return _reduce([_flat_f(c) for c in dnf])


# ---------------------------------------------------------------------------
# normal form types

def _gf(x: Formula) -> Formula:
    return Globally(Finally(x))


def _fg(x: Formula) -> Formula:
    return Finally(Globally(x))


def _paren(phi: Formula) -> str:
    return "(" + to_string(phi) + ")"


def _render(disjuncts_: list) -> str:
    """``(F G a) | ((F G c) & (G F b))`` style rendering."""
    if not disjuncts_:
        return "false"
    parts = []
    for conjs in disjuncts_:
        if not conjs:
            parts.append("true")
        elif len(conjs) == 1 or len(disjuncts_) == 1:
            parts.append(" & ".join(_paren(c) for c in conjs))
        else:
            parts.append("(" + " & ".join(_paren(c) for c in conjs) + ")")
    return " | ".join(parts)


@dataclass(frozen=True)
class FGDisjunct:
    fg_literal: Formula = TRUE
    gf_literals: tuple = ()

    def conjuncts(self) -> list:
        out = [] if self.fg_literal == TRUE else [_fg(self.fg_literal)]
        return out + [_gf(x) for x in self.gf_literals]

    def to_formula(self) -> Formula:
        return conj(self.conjuncts())


@dataclass(frozen=True)
class FGNormalForm:
    disjuncts: tuple
    trace: tuple = field(default=(), compare=False)
    peak_nodes: int = field(default=0, compare=False)

    def to_formula(self) -> Formula:
        return disj(d.to_formula() for d in self.disjuncts)

    def __str__(self):
        return _render([d.conjuncts() for d in self.disjuncts])


@dataclass(frozen=True)
class GeneralDisjunct:
    """``core & F G fg_residue & /\\ G F gf_residues``."""

    core: Formula = TRUE
    fg_residue: Formula = TRUE
    gf_residues: tuple = ()

    def conjuncts(self) -> list:
        out = [] if self.core == TRUE else [self.core]
        if self.fg_residue != TRUE:
            out.append(_fg(self.fg_residue))
        return out + [_gf(x) for x in self.gf_residues]

    def to_formula(self) -> Formula:
        return conj(self.conjuncts())

    @property
    def cost_class(self) -> int:
        """0: everything propositional; 1: some GF residue needs an
        automaton; 2: the FG residue needs one."""
        if not is_propositional(self.fg_residue):
            return 2
        if not all(is_propositional(x) for x in self.gf_residues):
            return 1
        return 0


@dataclass(frozen=True)
class GeneralNormalForm:
    disjuncts: tuple
    trace: tuple = field(default=(), compare=False)
    peak_nodes: int = field(default=0, compare=False)

    def to_formula(self) -> Formula:
        return disj(d.to_formula() for d in self.disjuncts)

    def __str__(self):
        return _render([d.conjuncts() for d in self.disjuncts])


def _check_cap(phi: Formula, cap: int) -> None:
    n = size(phi)
    if n > cap:
        raise SizeCapExceeded(n, cap)


def flatten_fg(phi: Formula, size_cap: int = DEFAULT_SIZE_CAP) -> FGNormalForm:
    """Fair normal form ``\\/ (F G l & /\\ G F l_j)`` of an LTL(F,G) fairness."""
    frag = classify_fragment(phi)
    if frag not in (Fragment.PROPOSITIONAL, Fragment.LTL_FG):
        raise PreconditionViolation(f"flatten_fg needs an LTL(F,G) formula, got {frag}")
    _check_cap(phi, size_cap)
    budget = _Budget(size_cap)
    trace: list = []
    dnf = _flatten_top(phi, budget, trace)
    out = []
    for c in dnf:
        out.append(FGDisjunct(_and_all(_sorted(c.g)), tuple(_sorted(c.f))))
    return FGNormalForm(tuple(out), tuple(trace), max(budget.peak, size(phi)))


# ---------------------------------------------------------------------------
# moving F/G out from under U and X

def _rigid(phi: Formula) -> bool:
    """A boolean combination of F/G-rooted items: constant along a periodic word."""
    if isinstance(phi, (Finally, Globally)):
        return True
    if isinstance(phi, (And, Or)):
        return _rigid(phi.lhs) and _rigid(phi.rhs)
    return False


def _reduce_items(clauses: list) -> list:
    uniq = list(dict.fromkeys((frozenset(a), frozenset(b)) for a, b in clauses))
    keep = []
    for i, (a, b) in enumerate(uniq):
        if any(j != i and a2 <= a and b2 <= b for j, (a2, b2) in enumerate(uniq)):
            continue
        keep.append((a, b))
    return keep


def _items_nf(phi: Formula, budget: _Budget, outer) -> list:
    """Clause form over opaque items: list of (F/G-free items, F/G items).

    ``outer`` is Or for DNF and And for CNF.
    """
    if _temporal_free(phi):
        return [(frozenset([phi]), frozenset())]
    if isinstance(phi, (Finally, Globally)):
        return [(frozenset(), frozenset([phi]))]
    if isinstance(phi, outer):
        return _reduce_items(_items_nf(phi.lhs, budget, outer) + _items_nf(phi.rhs, budget, outer))
    if isinstance(phi, (And, Or)):
        out = []
        for x in _items_nf(phi.lhs, budget, outer):
            for y in _items_nf(phi.rhs, budget, outer):
                out.append((x[0] | y[0], x[1] | y[1]))
        out = _reduce_items(out)
        _note_items(out, budget)
        return out
    raise PreconditionViolation(f"unexpected node {type(phi).__name__}")


def _items_dnf(phi: Formula, budget: _Budget) -> list:
    return _items_nf(phi, budget, Or)


def _items_cnf(phi: Formula, budget: _Budget) -> list:
    return _items_nf(phi, budget, And)


def _note_items(clauses, budget: _Budget) -> None:
    total = sum(1 + sum(_size(x) + 1 for x in a | b) for a, b in clauses)
    budget.peak = max(budget.peak, total)
    if total > budget.cap:
        raise SizeCapExceeded(total, budget.cap)


def _f_pure(x: Formula, trace: list) -> Formula:
    while isinstance(x, Until):
        trace.append("F(a U b) -> F b")
        x = x.rhs
    if isinstance(x, (TrueF, FalseF)):
        return x
    return Finally(x)


def _g_pure(x: Formula, trace: list) -> Formula:
    if isinstance(x, Until):
        trace.append("G(a U b) -> G(a | b) & F b")
        return _and(_g_pure(_or(x.lhs, x.rhs), trace), _f_pure(x.rhs, trace))
    if isinstance(x, (TrueF, FalseF)):
        return x
    return Globally(x)


def _split(items: list) -> tuple:
    """Partition operands into (F/G-free, rigid, mixed) lists."""
    pure, rigid, mixed = [], [], []
    for x in items:
        if _temporal_free(x):
            pure.append(x)
        elif _rigid(x):
            rigid.append(x)
        else:
            mixed.append(x)
    return pure, rigid, mixed


def _mk_f(phi: Formula, budget: _Budget, trace: list) -> Formula:
    if _temporal_free(phi):
        return _f_pure(phi, trace)
    if isinstance(phi, Finally):
        trace.append("F F -> F")
        return phi
    if isinstance(phi, Globally):
        return Finally(phi)
    if isinstance(phi, Or):
        trace.append("F(a | b) -> F a | F b")
        return _or(_mk_f(phi.lhs, budget, trace), _mk_f(phi.rhs, budget, trace))
    pure, rigid, mixed = _split(conjuncts(phi))
    if rigid and not pure and not mixed:
        return phi
    trace.append("F(a & T) -> F a & T for F/G-rooted T")
    if not mixed:
        return budget.note(_and(_f_pure(_and_all(pure), trace), _and_all(rigid)))
    # distribute over the first mixed disjunction
    m, rest = mixed[0], pure + mixed[1:]
    out = FALSE
    for d in disjuncts(m):
        out = _or(out, _mk_f(_and_all(rest + [d]), budget, trace))
    return budget.note(_and(out, _and_all(rigid)))


def _mk_g(phi: Formula, budget: _Budget, trace: list) -> Formula:
    if _temporal_free(phi):
        return _g_pure(phi, trace)
    if isinstance(phi, Globally):
        trace.append("G G -> G")
        return phi
    if isinstance(phi, Finally):
        return Globally(phi)
    if isinstance(phi, And):
        trace.append("G(a & b) -> G a & G b")
        return _and(_mk_g(phi.lhs, budget, trace), _mk_g(phi.rhs, budget, trace))
    pure, rigid, mixed = _split(disjuncts(phi))
    if rigid and not pure and not mixed:
        return phi
    trace.append("G(a | T) -> G a | T for F/G-rooted T")
    if not mixed:
        return budget.note(_or(_g_pure(_or_all(pure), trace), _or_all(rigid)))
    m, rest = mixed[0], pure + mixed[1:]
    out = TRUE
    for c in conjuncts(m):
        out = _and(out, _mk_g(_or_all(rest + [c]), budget, trace))
    return budget.note(_or(out, _or_all(rigid)))


def _mk_x(phi: Formula, trace: list) -> Formula:
    if _temporal_free(phi):
        return phi if isinstance(phi, (TrueF, FalseF)) else Next(phi)
    if isinstance(phi, (Finally, Globally)):
        trace.append("X F -> F, X G -> G")
        return phi
    if isinstance(phi, And):
        trace.append("X distributed over &")
        return _and(_mk_x(phi.lhs, trace), _mk_x(phi.rhs, trace))
    if isinstance(phi, Or):
        trace.append("X distributed over |")
        return _or(_mk_x(phi.lhs, trace), _mk_x(phi.rhs, trace))
    raise PreconditionViolation(f"unexpected node {type(phi).__name__}")


def _until_pure(a: Formula, b: Formula, trace: list) -> Formula:
    if b in (TRUE, FALSE) or a == FALSE:
        return b
    if a == TRUE:
        return _f_pure(b, trace)
    return Until(a, b)


def _mk_u(lhs: Formula, rhs: Formula, budget: _Budget, trace: list) -> Formula:
    if _temporal_free(lhs) and _temporal_free(rhs):
        return _until_pure(lhs, rhs, trace)
    trace.append("U reshaped: lhs to CNF, rhs to DNF")
    cnf = _items_cnf(lhs, budget)
    dnf = _items_dnf(rhs, budget)
    out = TRUE
    for c_pure, c_temp in cnf:
        pc = _or_all(c_pure)
        row = FALSE
        for d_pure, d_temp in dnf:
            pd = _and_all(d_pure)
            # c U pd, where c = pc | \/c_temp and each temporal item is
            # position invariant on a periodic word
            cu = _until_pure(pc, pd, trace)
            fpd = _f_pure(pd, trace)
            for t in c_temp:
                cu = _or(cu, _and(t, fpd))
            row = _or(row, _and(cu, _and_all(d_temp)))
        out = _and(out, row)
        budget.note(out)
    return out


def push_temporal(phi: Formula, size_cap: int = DEFAULT_SIZE_CAP,
                  trace: Optional[list] = None, _budget: Optional[_Budget] = None) -> Formula:
    """Move every F and G out from under U and X (innermost first).

    The result agrees with ``phi`` on all purely periodic words.  It is a
    boolean combination of F/G-free subformulas and of F/G-rooted
    subformulas in which no F or G sits below a U or X.
    """
    if has_node(phi, WeakUntil):
        raise PreconditionViolation("push_temporal needs a W-free formula")
    budget = _budget or _Budget(size_cap)
    trace = trace if trace is not None else []
    budget.note(phi)
    return _push(phi, budget, trace)


def _push(phi: Formula, budget: _Budget, trace: list) -> Formula:
    if _temporal_free(phi):
        return phi
    if isinstance(phi, And):
        return _and(_push(phi.lhs, budget, trace), _push(phi.rhs, budget, trace))
    if isinstance(phi, Or):
        return _or(_push(phi.lhs, budget, trace), _push(phi.rhs, budget, trace))
    if isinstance(phi, Finally):
        return _mk_f(_push(phi.sub, budget, trace), budget, trace)
    if isinstance(phi, Globally):
        return _mk_g(_push(phi.sub, budget, trace), budget, trace)
    if isinstance(phi, Next):
        return _mk_x(_push(phi.sub, budget, trace), trace)
    if isinstance(phi, Until):
        return _mk_u(_push(phi.lhs, budget, trace), _push(phi.rhs, budget, trace), budget, trace)
    raise PreconditionViolation(f"unexpected node {type(phi).__name__}")


def fair_normal_form(phi: Formula, size_cap: int = DEFAULT_SIZE_CAP) -> GeneralNormalForm:
    """``\\/ (core & F G fg_residue & /\\ G F gf_residue)`` for a fairness.

    Residues are LTL(U,X); the core is always ``true`` here (the checker
    also accepts disjuncts with an LTL(F,G) core).  Disjuncts are ordered
    cheapest first.
    """
    _check_cap(phi, size_cap)
    trace: list = []
    budget = _Budget(size_cap)
    if has_node(phi, WeakUntil):
        trace.append("W eliminated")
    pushed = push_temporal(simplify(eliminate_w(phi)), trace=trace, _budget=budget)
    dnf = _flatten_top(pushed, budget, trace)
    out = [GeneralDisjunct(TRUE, _and_all(_sorted(c.g)), tuple(_sorted(c.f))) for c in dnf]
    out.sort(key=lambda d: d.cost_class)
    return GeneralNormalForm(tuple(out), tuple(trace), max(budget.peak, size(phi)))


def flatten_disjuncts(phi: Formula, size_cap: int = DEFAULT_SIZE_CAP) -> list:
    """LTL(F,G) normal form of ``phi`` as a list of FGDisjunct."""
    return list(flatten_fg(phi, size_cap).disjuncts)


# ---------------------------------------------------------------------------
# fast-formula grammar

class FastClass(enum.Enum):
    PHI_F = "PhiF"
    PHI_E = "PhiE"
    NEITHER = "Neither"

    def __str__(self):
        return self.value


def _is_ux(phi: Formula) -> bool:
    return not has_node(phi, (Finally, Globally, WeakUntil))


def _is_phi0(phi: Formula) -> bool:
    if _is_ux(phi):
        return True
    if isinstance(phi, (Finally, Globally)):
        return _is_phi0(phi.sub)
    if isinstance(phi, And):
        return _is_phi0(phi.lhs) and _is_phi0(phi.rhs)
    return False


def _is_phi_f(phi: Formula) -> bool:
    if isinstance(phi, Or) and not _is_ux(phi):
        return _is_phi_f(phi.lhs) and _is_phi_f(phi.rhs)
    return _is_phi0(phi)


def _is_phi_e(phi: Formula) -> bool:
    if _is_ux(phi):
        return True
    if isinstance(phi, (Finally, Globally)):
        return _is_phi_e(phi.sub)
    if isinstance(phi, (And, Or)):
        return _is_phi_e(phi.lhs) and _is_phi_e(phi.rhs)
    return False


def classify_fast(phi: Formula) -> FastClass:
    if _is_phi_f(phi):
        return FastClass.PHI_F
    if _is_phi_e(phi):
        return FastClass.PHI_E
    return FastClass.NEITHER


# ---------------------------------------------------------------------------
# rewrite rules, as templates over metavariables p1, p2, p3

@dataclass(frozen=True)
class Rule:
    name: str
    lhs: str
    rhs: str
    # True when lhs and rhs agree on every word, not only periodic ones
    full: bool = False

    def instantiate(self, *args: Formula) -> tuple:
        env = {f"p{i + 1}": a for i, a in enumerate(args)}
        return substitute(parse_pnf(self.lhs), env), substitute(parse_pnf(self.rhs), env)

    @property
    def arity(self) -> int:
        text = self.lhs + " " + self.rhs
        return max(i for i in (1, 2, 3) if f"p{i}" in text)


def substitute(phi: Formula, env: dict) -> Formula:
    if isinstance(phi, Atom):
        return env.get(phi.name, phi)
    if isinstance(phi, NegAtom):
        if phi.name in env:
            raise ValueError("metavariables must occur positively")
        return phi
    from .ltl import children, rebuild
    return rebuild(phi, [substitute(c, env) for c in children(phi)])


RULES = (
    Rule("FF", "F F p1", "F p1"),
    Rule("F-until", "F (p1 U p2)", "F p2"),
    Rule("X-and", "X (p1 & p2)", "X p1 & X p2"),
    Rule("X-or", "X (p1 | p2)", "X p1 | X p2"),
    Rule("F-or", "F (p1 | p2)", "F p1 | F p2"),
    Rule("F-and-F", "F (p1 & F p2)", "F p1 & F p2"),
    Rule("F-and-G", "F (p1 & G p2)", "F p1 & G p2"),
    Rule("until-or", "p1 U (p2 | p3)", "(p1 U p2) | (p1 U p3)"),
    Rule("and-until", "(p1 & p2) U p3", "(p1 U p3) & (p2 U p3)"),
    Rule("until-and-F", "p1 U (p2 & F p3)", "(p1 U p2) & F p3"),
    Rule("until-or-F", "p1 U (p2 | F p3)", "(p1 U p2) | F p3"),
    Rule("until-and-G", "p1 U (p2 & G p3)", "(p1 U p2) & G p3"),
    Rule("until-or-G", "p1 U (p2 | G p3)", "(p1 U p2) | G p3"),
    Rule("GG", "G G p1", "G p1"),
    Rule("G-until", "G (p1 U p2)", "G (p1 | p2) & F p2"),
    Rule("XF", "X F p1", "F p1"),
    Rule("XG", "X G p1", "G p1"),
    Rule("G-and", "G (p1 & p2)", "G p1 & G p2"),
    Rule("G-or-G", "G (p1 | G p2)", "G p1 | G p2"),
    Rule("G-or-F", "G (p1 | F p2)", "G p1 | F p2"),
    Rule("or-G-until", "(p1 | G p2) U p3", "(G p2 & F p3) | (p1 U p3)"),
    Rule("or-F-until", "(p1 | F p2) U p3", "(F p2 & F p3) | (p1 U p3)"),
    Rule("and-F-until", "(p1 & F p2) U p3", "(F p2 & (p1 U p3)) | p3"),
    Rule("and-G-until", "(p1 & G p2) U p3", "(G p2 & (p1 U p3)) | p3"),
    Rule("FG-periodic", "F G p1", "G p1"),
    Rule("GF-periodic", "G F p1", "F p1"),
    Rule("GF-or", "G F (p1 | p2)", "G F p1 | G F p2", full=True),
    Rule("FG-and", "F G (p1 & p2)", "F G p1 & F G p2", full=True),
    Rule("GF-and-F", "G F (p1 & F p2)", "G F p1 & G F p2", full=True),
    Rule("GF-and-G", "G F (p1 & G p2)", "G F p1 & F G p2", full=True),
    Rule("FG-or-G", "F G (p1 | G p2)", "F G p1 | F G p2", full=True),
    Rule("FG-or-F", "F G (p1 | F p2)", "F G p1 | G F p2", full=True),
)
