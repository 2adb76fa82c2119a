"""Model checking engines.

* :func:`fair_mc` decides ``K |= phi`` for LTL(F,G) fairness formulas by
  SCC analysis alone, with no automaton.
* :func:`acc_path` searches for a path satisfying one disjunct of a general
  fair normal form; automata appear only for non-propositional residues.
* :func:`check_fair` dispatches between the two; :func:`check_under_fairness`
  handles arbitrary properties under a fairness assumption.
* :func:`classic_mc` is the automata-theoretic baseline and
  :func:`brute_force_mc` a bounded lasso enumeration used as an oracle.
"""
from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .buchi import DEFAULT_STATE_CAP, TranslationCapExceeded, translate
from .kripke import KripkeStructure, product, sub_model, tarjan_sccs
from .ltl import (
    TRUE, And, Atom, Finally, Formula, Fragment, Globally, LassoWord,
    Or, classify_fragment, eval_lasso, eval_prop, is_propositional, negate, size,
)
from .transform import (
    DEFAULT_SIZE_CAP, FGDisjunct, GeneralDisjunct, PreconditionViolation,
    SizeCapExceeded, fair_normal_form, flatten_fg,
)


@dataclass
class EngineStats:
    automaton_states_built: int = 0
    product_states_built: int = 0
    sccs_examined: int = 0
    disjuncts_checked: int = 0
    wall_time: float = 0.0
    peak_formula_nodes: int = 0
    fallback: str = ""

    def merge(self, other: "EngineStats") -> None:
        self.automaton_states_built += other.automaton_states_built
        self.product_states_built += other.product_states_built
        self.sccs_examined += other.sccs_examined
        self.disjuncts_checked += other.disjuncts_checked
        self.peak_formula_nodes = max(self.peak_formula_nodes, other.peak_formula_nodes)
        self.fallback = self.fallback or other.fallback


@dataclass(frozen=True)
class Lasso:
    """``prefix . loop^omega`` over state indices of some model."""

    prefix: tuple
    loop: tuple

    def __post_init__(self):
        if not self.loop:
            raise ValueError("loop must be nonempty")

    @property
    def states(self) -> tuple:
        return self.prefix + self.loop

    def loop_set(self) -> frozenset:
        return frozenset(self.loop)

    def normalized(self) -> "Lasso":
        """Same infinite path with the prefix tail folded into the loop."""
        prefix, loop = list(self.prefix), list(self.loop)
        while prefix and prefix[-1] == loop[-1]:
            loop.insert(0, loop.pop())
            prefix.pop()
        return Lasso(tuple(prefix), tuple(loop))


@dataclass(frozen=True)
class Verdict:
    holds: bool
    witness: Optional[Lasso] = None
    stats: EngineStats = field(default_factory=EngineStats)


def trace(K: KripkeStructure, lasso: Lasso) -> LassoWord:
    return LassoWord(tuple(K.labels[s] for s in lasso.prefix),
                     tuple(K.labels[s] for s in lasso.loop))


def is_path(K: KripkeStructure, lasso: Lasso) -> bool:
    """Starts at an initial state and every step (seam and closure included)
    is a transition of ``K``."""
    seq = list(lasso.prefix) + list(lasso.loop) + [lasso.loop[0]]
    if seq[0] not in K.init:
        return False
    return all(K.has_edge(a, b) for a, b in zip(seq, seq[1:]))


def format_lasso(K: KripkeStructure, lasso: Lasso) -> str:
    pre = " ".join(K.names[s] for s in lasso.prefix)
    loop = " ".join(K.names[s] for s in lasso.loop)
    return f"prefix: {pre} ; loop: {loop}".replace("prefix:  ;", "prefix: ;")


def format_trace(K: KripkeStructure, lasso: Lasso) -> str:
    def fmt(states):
        return " ".join("{" + ",".join(sorted(K.labels[s])) + "}" for s in states)
    return f"trace: {fmt(lasso.prefix)} ( {fmt(lasso.loop)} )^w".replace("trace:  (", "trace: (")


# ---------------------------------------------------------------------------
# paths inside a state set

def _bfs_path(K: KripkeStructure, sources: Iterable[int], targets, allowed=None,
              nonempty: bool = False) -> Optional[list]:
    """Shortest path from any source to any target (lowest index first).

    With ``nonempty`` a path must take at least one step even if a source is
    already a target.
    """
    targets = set(targets)
    parent = {}
    queue = deque()
    for s in sorted(set(sources)):
        if s in targets and not nonempty:
            return [s]
        if allowed is None or s in allowed:
            parent[(s, 0)] = None
            queue.append((s, 0))
    seen = set()
    while queue:
        node = queue.popleft()
        s, _ = node
        for t in K.succ[s]:
            if allowed is not None and t not in allowed:
                continue
            if t in targets:
                path = [t]
                cur = node
                while cur is not None:
                    path.append(cur[0])
                    cur = parent[cur]
                return path[::-1]
            if t not in seen:
                seen.add(t)
                parent[(t, 1)] = node
                queue.append((t, 1))
    return None


def _tour(K: KripkeStructure, members: frozenset, start: int,
          segments: Sequence[tuple] = ()) -> list:
    """Closed walk inside ``members`` from ``start`` visiting every member,
    then each ``(t_j, segment_j)`` in turn, and back to ``start``.

    Returns the loop (without the repeated final ``start``).
    """
    walk = [start]
    remaining = set(members) - {start}

    def extend(path):
        walk.extend(path[1:])

    while remaining:
        path = _bfs_path(K, [walk[-1]], remaining, members)
        extend(path)
        remaining -= set(path)
    for t, seg in segments:
        extend(_bfs_path(K, [walk[-1]], [t], members))
        extend(list(seg))
    if walk[-1] != start or len(walk) == 1:
        extend(_bfs_path(K, [walk[-1]], [start], members, nonempty=True))
    return walk[:-1]


def _reachable_from_init(K: KripkeStructure) -> set:
    return set(K.reachable())


# ---------------------------------------------------------------------------
# accepting SCCs

def scc_accepting(B, d: FGDisjunct, K: KripkeStructure) -> bool:
    """Every state of ``B`` satisfies the FG literal and each GF literal is
    satisfied somewhere in ``B``."""
    members = B.members if hasattr(B, "members") else frozenset(B)
    if hasattr(B, "trivial") and B.trivial:
        return False
    if not all(eval_prop(d.fg_literal, K.labels[s]) for s in members):
        return False
    return all(any(eval_prop(l, K.labels[s]) for s in members) for l in d.gf_literals)


def _candidate_sccs(K: KripkeStructure, fg: Formula, stats: EngineStats,
                    reach: Optional[set] = None) -> list:
    """Nontrivial maximal SCCs of the ``fg``-restriction reachable in ``K``."""
    reach = _reachable_from_init(K) if reach is None else reach
    B = [s for s in sorted(reach) if eval_prop(fg, K.labels[s])]
    out = []
    for comp in tarjan_sccs(K, B):
        stats.sccs_examined += 1
        if not comp.trivial:
            out.append(comp)
    return out


def _lasso_into(K: KripkeStructure, members: frozenset, segments=()) -> Lasso:
    prefix = _bfs_path(K, K.init, members)
    entry = prefix[-1]
    loop = _tour(K, members, entry, segments)
    return Lasso(tuple(prefix[:-1]), tuple(loop))


def _find_fg_disjunct(K: KripkeStructure, d: FGDisjunct, stats: EngineStats,
                      reach: Optional[set] = None) -> Optional[Lasso]:
    for comp in _candidate_sccs(K, d.fg_literal, stats, reach):
        if scc_accepting(comp, d, K):
            return _lasso_into(K, comp.members)
    return None


def fair_mc(phi: Formula, K: KripkeStructure, size_cap: int = DEFAULT_SIZE_CAP) -> Verdict:
    """``K |= phi`` for an LTL(F,G) fairness ``phi``, without automata."""
    t0 = time.perf_counter()
    frag = classify_fragment(phi)
    if frag not in (Fragment.PROPOSITIONAL, Fragment.LTL_FG):
        raise PreconditionViolation(f"fair_mc needs an LTL(F,G) formula, got {frag}")
    stats = EngineStats()
    nf = flatten_fg(negate(phi), size_cap)
    stats.peak_formula_nodes = nf.peak_nodes
    reach = _reachable_from_init(K)
    witness = None
    for d in nf.disjuncts:
        stats.disjuncts_checked += 1
        witness = _find_fg_disjunct(K, d, stats, reach)
        if witness is not None:
            break
    stats.wall_time = time.perf_counter() - t0
    return Verdict(witness is None, witness, stats)


# ---------------------------------------------------------------------------
# general disjuncts

def _finite_witness(K: KripkeStructure, members: frozenset, phi: Formula,
                    stats: EngineStats, state_cap: int) -> Optional[tuple]:
    """Some ``t`` in ``members`` and a finite path from ``t`` inside
    ``members`` after which the co-safety formula ``phi`` is guaranteed.

    Returns ``(t, path)`` with ``path[0] == t``, or None.
    """
    if classify_fragment(phi) not in (Fragment.PROPOSITIONAL, Fragment.LTL_UX):
        raise PreconditionViolation(f"GF residue outside LTL(U,X): {phi}")
    A = translate(phi, state_cap)
    stats.automaton_states_built += A.n_states
    if not A.terminal:
        return None
    out = A.edges_from()
    for t in sorted(members):
        start = [(t, q) for q in sorted(A.initial)]
        parent = {x: None for x in start}
        queue = deque(start)
        hit = None
        while queue and hit is None:
            s, q = node = queue.popleft()
            if q in A.terminal:
                hit = node
                break
            qs = sorted({d for g, d in out[q] if eval_prop(g, K.labels[s])})
            for s2 in K.succ[s]:
                if s2 not in members:
                    continue
                for q2 in qs:
                    nxt = (s2, q2)
                    if nxt not in parent:
                        parent[nxt] = node
                        queue.append(nxt)
        stats.product_states_built += len(parent)
        if hit is not None:
            path = []
            cur = hit
            while cur is not None:
                path.append(cur[0])
                cur = parent[cur]
            return t, tuple(path[::-1])
    return None


def _split_core(core: Formula, size_cap: int) -> list:
    if core == TRUE:
        return [FGDisjunct()]
    return list(flatten_fg(core, size_cap).disjuncts)


def acc_path(psi: GeneralDisjunct, K: KripkeStructure, size_cap: int = DEFAULT_SIZE_CAP,
             state_cap: int = DEFAULT_STATE_CAP, stats: Optional[EngineStats] = None) -> Verdict:
    """Is there a path of ``K`` satisfying
    ``core & F G fg_residue & /\\ G F gf_residues``?

    ``holds`` is True when such a path exists; the witness is one.
    """
    t0 = time.perf_counter()
    own = stats is None
    stats = EngineStats() if own else stats
    witness = _acc_path(psi, K, size_cap, state_cap, stats)
    if own:
        stats.wall_time = time.perf_counter() - t0
    return Verdict(witness is not None, witness, stats)


def _acc_path(psi: GeneralDisjunct, K: KripkeStructure, size_cap: int, state_cap: int,
              stats: EngineStats) -> Optional[Lasso]:
    if not is_propositional(psi.fg_residue):
        A = translate(Finally(Globally(psi.fg_residue)), state_cap)
        stats.automaton_states_built += A.n_states
        P = product(K, A, max_states=state_cap)
        stats.product_states_built += len(P.pairs)
        inner = GeneralDisjunct(psi.core, TRUE, psi.gf_residues + (Atom(P.accepting_prop),))
        w = _acc_path(inner, P.kripke, size_cap, state_cap, stats)
        if w is None:
            return None
        return Lasso(tuple(P.project(w.prefix)), tuple(P.project(w.loop))).normalized()
    props = [x for x in psi.gf_residues if is_propositional(x)]
    temporal = [x for x in psi.gf_residues if not is_propositional(x)]
    reach = _reachable_from_init(K)
    for cd in _split_core(psi.core, size_cap):
        fg = psi.fg_residue if cd.fg_literal == TRUE else And(cd.fg_literal, psi.fg_residue)
        d = FGDisjunct(fg, tuple(cd.gf_literals) + tuple(props))
        for comp in _candidate_sccs(K, fg, stats, reach):
            if not scc_accepting(comp, d, K):
                continue
            segments = []
            for phi_j in temporal:
                found = _finite_witness(K, comp.members, phi_j, stats, state_cap)
                if found is None:
                    break
                segments.append(found)
            else:
                return _lasso_into(K, comp.members, segments)
    return None


def _fallback(phi: Formula, K: KripkeStructure, reason: Exception, stats: EngineStats,
              state_cap: int, t0: float) -> Verdict:
    v = classic_mc(phi, K, state_cap)
    v.stats.merge(stats)
    v.stats.fallback = type(reason).__name__
    v.stats.wall_time = time.perf_counter() - t0
    return v


def check_fair(phi: Formula, K: KripkeStructure, size_cap: int = DEFAULT_SIZE_CAP,
               state_cap: int = DEFAULT_STATE_CAP, fallback: bool = True) -> Verdict:
    """``K |= phi`` for a fairness ``phi`` (trusted, not re-checked).

    When a size or state cap is hit, ``fallback`` reruns the check with
    :func:`classic_mc` and names the cause in ``stats.fallback``; otherwise
    the cap exception propagates.
    """
    t0 = time.perf_counter()
    stats = EngineStats()
    try:
        if classify_fragment(phi) in (Fragment.PROPOSITIONAL, Fragment.LTL_FG):
            return fair_mc(phi, K, size_cap)
        nf = fair_normal_form(negate(phi), size_cap)
        stats.peak_formula_nodes = nf.peak_nodes
        witness = None
        for d in nf.disjuncts:
            stats.disjuncts_checked += 1
            witness = _acc_path(d, K, size_cap, state_cap, stats)
            if witness is not None:
                break
    except (SizeCapExceeded, TranslationCapExceeded) as exc:
        if not fallback:
            raise
        return _fallback(phi, K, exc, stats, state_cap, t0)
    stats.wall_time = time.perf_counter() - t0
    return Verdict(witness is None, witness, stats)


def check_under_fairness(phi: Formula, fairness: Formula, K: KripkeStructure,
                         size_cap: int = DEFAULT_SIZE_CAP,
                         state_cap: int = DEFAULT_STATE_CAP, fallback: bool = True) -> Verdict:
    """``K |= fairness -> phi`` for an arbitrary ``phi``.

    Builds the product with an automaton for ``!phi`` and looks for a path
    satisfying ``fairness & G F accepting`` there.
    """
    t0 = time.perf_counter()
    stats = EngineStats()
    if phi == TRUE:
        stats.wall_time = time.perf_counter() - t0
        return Verdict(True, None, stats)
    try:
        A = translate(negate(phi), state_cap)
        stats.automaton_states_built += A.n_states
        P = product(K, A, max_states=state_cap)
        stats.product_states_built += len(P.pairs)
        acc = Atom(P.accepting_prop)
        if classify_fragment(fairness) in (Fragment.PROPOSITIONAL, Fragment.LTL_FG):
            nf = flatten_fg(fairness, size_cap)
            disjuncts = [GeneralDisjunct(TRUE, d.fg_literal, d.gf_literals) for d in nf.disjuncts]
        else:
            nf = fair_normal_form(fairness, size_cap)
            disjuncts = list(nf.disjuncts)
        stats.peak_formula_nodes = nf.peak_nodes
        witness = None
        for d in disjuncts:
            stats.disjuncts_checked += 1
            d = GeneralDisjunct(d.core, d.fg_residue, d.gf_residues + (acc,))
            w = _acc_path(d, P.kripke, size_cap, state_cap, stats)
            if w is not None:
                witness = Lasso(tuple(P.project(w.prefix)), tuple(P.project(w.loop))).normalized()
                break
    except (SizeCapExceeded, TranslationCapExceeded) as exc:
        if not fallback:
            raise
        return _fallback(Or(negate(fairness), phi), K, exc, stats, state_cap, t0)
    stats.wall_time = time.perf_counter() - t0
    return Verdict(witness is None, witness, stats)


# ---------------------------------------------------------------------------
# baseline and oracle

def classic_mc(phi: Formula, K: KripkeStructure, state_cap: int = DEFAULT_STATE_CAP) -> Verdict:
    """Automata-theoretic check: product with an automaton for ``!phi``,
    then a reachable cycle through an accepting product state."""
    t0 = time.perf_counter()
    stats = EngineStats()
    A = translate(negate(phi), state_cap)
    stats.automaton_states_built = A.n_states
    P = product(K, A, max_states=state_cap)
    PK = P.kripke
    stats.product_states_built = len(P.pairs)
    witness = None
    for comp in tarjan_sccs(PK):
        stats.sccs_examined += 1
        if comp.trivial:
            continue
        acc = sorted(s for s in comp.members if P.pairs[s][1] in A.accepting)
        if not acc:
            continue
        prefix = _bfs_path(PK, PK.init, [acc[0]])
        cycle = _bfs_path(PK, [acc[0]], [acc[0]], comp.members, nonempty=True)
        witness = Lasso(tuple(P.project(prefix[:-1])), tuple(P.project(cycle[:-1]))).normalized()
        break
    stats.wall_time = time.perf_counter() - t0
    return Verdict(witness is None, witness, stats)


def _walks(K: KripkeStructure, start: int, length: int) -> Iterable[tuple]:
    """All walks from ``start`` with exactly ``length`` further steps."""
    stack = [(start,)]
    while stack:
        w = stack.pop()
        if len(w) == length + 1:
            yield w
            continue
        for t in reversed(K.succ[w[-1]]):
            stack.append(w + (t,))


def _cycles(K: KripkeStructure, start: int, max_len: int, min_start: bool) -> Iterable[tuple]:
    """Closed walks ``start ... x`` with ``x -> start``, length <= max_len.

    With ``min_start`` only walks whose other states exceed ``start`` are
    produced (one rotation per cycle).
    """
    stack = [(start,)]
    while stack:
        w = stack.pop()
        if start in K.succ[w[-1]]:
            yield w
        if len(w) >= max_len:
            continue
        for t in reversed(K.succ[w[-1]]):
            if min_start and t <= start:
                continue
            stack.append(w + (t,))


def brute_force_mc(phi: Formula, K: KripkeStructure, max_prefix: Optional[int] = None,
                   max_loop: Optional[int] = None, prefix_independent: bool = False,
                   return_witness: bool = False):
    """Bounded lasso enumeration: False iff some lasso with prefix length
    <= max_prefix and loop length <= max_loop violates ``phi``.

    Defaults: both bounds ``|S| + |phi|``.  With ``prefix_independent``
    (sound only for fairness formulas) each loop is tried once, behind one
    shortest prefix, in one rotation.
    """
    bound = len(K) + size(phi)
    max_prefix = bound if max_prefix is None else max_prefix
    max_loop = bound if max_loop is None else max_loop
    cache = {}

    def violates(prefix, loop):
        key = (tuple(K.labels[s] for s in prefix), tuple(K.labels[s] for s in loop))
        r = cache.get(key)
        if r is None:
            r = cache[key] = not eval_lasso(LassoWord(*key), phi)
        return r

    if prefix_independent:
        reach = K.reachable()
        for v in sorted(reach):
            path = _bfs_path(K, K.init, [v])
            if len(path) - 1 > max_prefix:
                continue
            for loop in _cycles(K, v, max_loop, True):
                if violates(path[:-1], loop):
                    return (False, Lasso(tuple(path[:-1]), loop)) if return_witness else False
        return (True, None) if return_witness else True
    for s0 in K.init:
        for p in range(max_prefix + 1):
            for walk in _walks(K, s0, p):
                for loop in _cycles(K, walk[-1], max_loop, False):
                    if violates(walk[:-1], loop):
                        return (False, Lasso(walk[:-1], loop)) if return_witness else False
    return (True, None) if return_witness else True
