"""Nondeterministic Büchi automata with propositional edge guards, and a
tableau translation from LTL."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

from .ltl import (
    FALSE, TRUE, And, Atom, FalseF, Finally, Formula, Fragment, Globally,
    LassoWord, NegAtom, Next, Or, TrueF, Until, WeakUntil, classify_fragment,
    conj, eval_prop, parse_pnf, to_string,
)

DEFAULT_STATE_CAP = 50_000


class TranslationCapExceeded(Exception):
    def __init__(self, states: int):
        super().__init__(f"automaton/product state count exceeded cap ({states} states)")
        self.states = states


@dataclass(frozen=True, eq=False)
class BuchiAutomaton:
    """States are ``0..n_states-1``; edges are ``(src, guard, dst)``.

    ``terminal`` lists states from which every continuation is accepted
    (each has a ``true`` self-loop and is accepting); it is nonempty only
    for automata built in co-safety mode.
    """

    n_states: int
    initial: frozenset
    edges: tuple
    accepting: frozenset
    terminal: frozenset = frozenset()
    state_labels: tuple = field(default=(), compare=False)

    @cached_property
    def _out(self) -> tuple:
        out = [[] for _ in range(self.n_states)]
        for src, guard, dst in self.edges:
            out[src].append((guard, dst))
        return tuple(tuple(x) for x in out)

    def edges_from(self) -> tuple:
        """Per-state tuple of ``(guard, dst)`` pairs."""
        return self._out

    def successors(self, q: int, letter: frozenset) -> list:
        return sorted({dst for guard, dst in self._out[q] if eval_prop(guard, letter)})

    def to_text(self) -> str:
        """Adjacency dump, one state per block."""
        lines = [f"states: {self.n_states}",
                 "initial: " + " ".join(f"q{q}" for q in sorted(self.initial)),
                 "accepting: " + " ".join(f"q{q}" for q in sorted(self.accepting))]
        for q in range(self.n_states):
            desc = f"  # {self.state_labels[q]}" if self.state_labels else ""
            lines.append(f"q{q}:{desc}")
            for guard, dst in self._out[q]:
                lines.append(f"  -[{to_string(guard)}]-> q{dst}")
        return "\n".join(lines) + "\n"

    def to_hoa(self, name: str = "") -> str:
        """HOA-like text with state-based acceptance."""
        atoms = sorted({a for _, g, _ in self.edges for a in _guard_atoms(g)})
        aidx = {a: i for i, a in enumerate(atoms)}
        lines = ["HOA: v1"]
        if name:
            lines.append(f'name: "{name}"')
        lines += [f"States: {self.n_states}"]
        lines += [f"Start: {q}" for q in sorted(self.initial)]
        lines.append(f"AP: {len(atoms)} " + " ".join(f'"{a}"' for a in atoms))
        lines += ["acc-name: Buchi", "Acceptance: 1 Inf(0)", "--BODY--"]
        for q in range(self.n_states):
            acc = " {0}" if q in self.accepting else ""
            lines.append(f"State: {q}{acc}")
            for guard, dst in self._out[q]:
                lines.append(f"  [{_hoa_guard(guard, aidx)}] {dst}")
        lines.append("--END--")
        return "\n".join(lines) + "\n"


def _guard_atoms(g: Formula) -> set:
    if isinstance(g, (Atom, NegAtom)):
        return {g.name}
    if isinstance(g, (And, Or)):
        return _guard_atoms(g.lhs) | _guard_atoms(g.rhs)
    return set()


def _hoa_guard(g: Formula, aidx: dict) -> str:
    if isinstance(g, TrueF):
        return "t"
    if isinstance(g, FalseF):
        return "f"
    if isinstance(g, Atom):
        return str(aidx[g.name])
    if isinstance(g, NegAtom):
        return f"!{aidx[g.name]}"
    op = "&" if isinstance(g, And) else "|"
    return f"({_hoa_guard(g.lhs, aidx)} {op} {_hoa_guard(g.rhs, aidx)})"


# ---------------------------------------------------------------------------
# tableau

def _order(f: Formula):
    return to_string(f)


def _expand(obligations: frozenset) -> list:
    """Covers of an obligation set: ``(literals, next, postponed)`` triples.

    ``postponed`` holds the U/F eventualities deferred on this step.
    """
    out = []
    seen = set()

    def go(pending: list, done: frozenset, lits: frozenset, nxt: frozenset, post: frozenset):
        while pending:
            f = pending.pop()
            if f in done:
                continue
            done = done | {f}
            if isinstance(f, TrueF):
                continue
            if isinstance(f, FalseF):
                return
            if isinstance(f, (Atom, NegAtom)):
                neg = NegAtom(f.name) if isinstance(f, Atom) else Atom(f.name)
                if neg in lits:
                    return
                lits = lits | {f}
            elif isinstance(f, And):
                pending = pending + [f.rhs, f.lhs]
            elif isinstance(f, Next):
                nxt = nxt | {f.sub}
            elif isinstance(f, Globally):
                pending = pending + [f.sub]
                nxt = nxt | {f}
            elif isinstance(f, Or):
                go(pending + [f.lhs], done, lits, nxt, post)
                pending = pending + [f.rhs]
            elif isinstance(f, Until):
                go(pending + [f.rhs], done, lits, nxt, post)
                pending = pending + [f.lhs]
                nxt = nxt | {f}
                post = post | {f}
            elif isinstance(f, Finally):
                go(pending + [f.sub], done, lits, nxt, post)
                nxt = nxt | {f}
                post = post | {f}
            elif isinstance(f, WeakUntil):
                go(pending + [f.rhs], done, lits, nxt, post)
                pending = pending + [f.lhs]
                nxt = nxt | {f}
            else:
                raise TypeError(f"not in positive normal form: {f!r}")
        key = (lits, nxt, post)
        if key not in seen:
            seen.add(key)
            out.append(key)

    go(sorted(obligations, key=_order, reverse=True), frozenset(), frozenset(), frozenset(), frozenset())
    return out


def _eventualities(phi: Formula) -> list:
    out = set()
    stack = [phi]
    while stack:
        f = stack.pop()
        if isinstance(f, (Until, Finally)):
            out.add(f)
        if isinstance(f, (And, Or, Until, WeakUntil)):
            stack += [f.lhs, f.rhs]
        elif isinstance(f, (Next, Finally, Globally)):
            stack.append(f.sub)
    return sorted(out, key=_order)


def _guard(lits: frozenset) -> Formula:
    return conj(sorted(lits, key=lambda x: (x.name, isinstance(x, NegAtom))))


def translate(phi: Formula, cap: int = DEFAULT_STATE_CAP) -> BuchiAutomaton:
    """Büchi automaton for a PNF formula.

    Obligation-set tableau with one transition acceptance set per U/F
    subformula, degeneralized with a level counter.  Formulas without F, G
    or W get a terminal automaton whose only accepting state is the empty
    obligation set.  Unreachable states and states that cannot reach an
    accepting cycle are removed.
    """
    if classify_fragment(phi) in (Fragment.PROPOSITIONAL, Fragment.LTL_UX):
        return _translate_terminal(phi, cap)
    evs = _eventualities(phi)
    k = len(evs)
    start = frozenset([phi])
    index = {}
    labels = []
    edges = []
    queue = deque()

    def visit(key):
        if key not in index:
            if len(index) >= cap:
                raise TranslationCapExceeded(len(index))
            index[key] = len(index)
            labels.append(key)
            queue.append(key)
        return index[key]

    covers_cache = {}
    visit((start, 0))
    while queue:
        key = queue.popleft()
        obl, level = key
        src = index[key]
        covers = covers_cache.get(obl)
        if covers is None:
            covers = covers_cache[obl] = _expand(obl)
        base = 0 if level == k else level
        for lits, nxt, post in covers:
            j = base
            while j < k and evs[j] not in post:
                j += 1
            edges.append((src, _guard(lits), visit((nxt, j))))
    accepting = {index[key] for key in index if key[1] == k}
    descr = [f"{{{', '.join(sorted(map(to_string, o)))}}}/{lv}" for o, lv in labels]
    return _trim(len(index), {0}, edges, accepting, set(), descr)


def _translate_terminal(phi: Formula, cap: int) -> BuchiAutomaton:
    index = {}
    labels = []
    edges = []
    queue = deque()

    def visit(obl):
        if obl not in index:
            if len(index) >= cap:
                raise TranslationCapExceeded(len(index))
            index[obl] = len(index)
            labels.append(obl)
            queue.append(obl)
        return index[obl]

    visit(frozenset([phi]))
    sink = None
    while queue:
        obl = queue.popleft()
        src = index[obl]
        if not obl:
            sink = src
            edges.append((src, TRUE, src))
            continue
        for lits, nxt, _ in _expand(obl):
            edges.append((src, _guard(lits), visit(nxt)))
    term = {sink} if sink is not None else set()
    descr = ["{" + ", ".join(sorted(map(to_string, o))) + "}" for o in labels]
    return _trim(len(index), {0}, edges, set(term), set(term), descr)


def _trim(n: int, initial: set, edges: list, accepting: set, terminal: set,
          descr: list) -> BuchiAutomaton:
    """Keep states that are reachable and can reach an accepting cycle."""
    from .kripke import KripkeStructure, tarjan_sccs
    succ = [set() for _ in range(n)]
    for s, _, d in edges:
        succ[s].add(d)
    K = KripkeStructure(tuple(map(str, range(n))), tuple(sorted(initial)),
                        tuple(tuple(sorted(x)) for x in succ),
                        tuple(frozenset() for _ in range(n)), frozenset(), total=False)
    good = set()
    for comp in tarjan_sccs(K):
        if not comp.trivial and comp.members & accepting:
            good |= comp.members
    pred = [set() for _ in range(n)]
    for s, _, d in edges:
        pred[d].add(s)
    live = set(good)
    queue = deque(good)
    while queue:
        q = queue.popleft()
        for p in pred[q]:
            if p not in live:
                live.add(p)
                queue.append(p)
    keep = [q for q in K.reachable() if q in live]
    if not keep:
        # empty language: one rejecting state
        return BuchiAutomaton(1, frozenset({0}), (), frozenset(), frozenset(), ("{false}",))
    keep.sort()
    pos = {q: i for i, q in enumerate(keep)}
    new_edges = tuple((pos[s], g, pos[d]) for s, g, d in edges if s in pos and d in pos)
    return BuchiAutomaton(
        len(keep), frozenset(pos[q] for q in initial if q in pos), new_edges,
        frozenset(pos[q] for q in accepting if q in pos),
        frozenset(pos[q] for q in terminal if q in pos),
        tuple(descr[q] for q in keep),
    )


# ---------------------------------------------------------------------------
# lasso membership

def accepts_lasso(A: BuchiAutomaton, w: LassoWord) -> bool:
    """Whether ``w`` is in the language of ``A``.

    Synchronizes A with the lasso's position graph and looks for a
    reachable cycle through an accepting state.
    """
    from .kripke import KripkeStructure, tarjan_sccs
    n = len(w)
    ls = len(w.prefix)
    out = A.edges_from()
    index = {}
    nodes = []
    succ = []
    queue = deque()

    def visit(node):
        if node not in index:
            index[node] = len(nodes)
            nodes.append(node)
            succ.append(())
            queue.append(node)
        return index[node]

    init = [visit((0, q)) for q in sorted(A.initial)]
    if not init:
        return False
    while queue:
        i, q = node = queue.popleft()
        letter = w.letter(i)
        j = i + 1 if i + 1 < n else ls
        succ[index[node]] = tuple(sorted({visit((j, d)) for g, d in out[q] if eval_prop(g, letter)}))
    G = KripkeStructure(tuple(map(str, range(len(nodes)))), tuple(init), tuple(succ),
                        tuple(frozenset() for _ in nodes), frozenset(), total=False)
    for comp in tarjan_sccs(G):
        if not comp.trivial and any(nodes[x][1] in A.accepting for x in comp.members):
            return True
    return False


def hand_built_automaton(negated_c_guard: bool = False) -> BuchiAutomaton:
    """Hand-built four-state automaton for ``F G (a | X (b U c))``.

    q1: ``a`` was just read; q2: ``!a`` was read, so ``b U c`` must hold
    next; q3: ``b U c`` is pending.  Leaving q3 on a ``c``-letter goes to q2
    when ``!a``.  With ``negated_c_guard=True`` that edge carries the guard
    ``!a & !c`` instead, which makes the automaton accept ``({b})^w``.
    """
    g = parse_pnf
    q3_q2 = "!a & !c" if negated_c_guard else "!a & c"
    edges = (
        (0, TRUE, 0), (0, g("a"), 1), (0, g("!a"), 2),
        (1, g("a"), 1), (1, g("!a"), 2),
        (2, g("a & c"), 1), (2, g("!a & c"), 2), (2, g("b & !c"), 3),
        (3, g("b & !c"), 3), (3, g("a & c"), 1), (3, g(q3_q2), 2),
    )
    return BuchiAutomaton(4, frozenset({0}), edges, frozenset({1, 2}), frozenset(),
                          ("q0", "q1", "q2", "q3"))


def universal_automaton() -> BuchiAutomaton:
    """One accepting state with a ``true`` self-loop."""
    return BuchiAutomaton(1, frozenset({0}), ((0, TRUE, 0),), frozenset({0}), frozenset({0}), ("{}",))
