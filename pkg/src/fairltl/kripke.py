"""Kripke structures, SCC decomposition, sub-models and Büchi products."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .ltl import eval_prop


class ModelError(ValueError):
    pass


class ModelSyntaxError(ModelError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class TotalityViolation(ModelError):
    def __init__(self, state: str):
        super().__init__(f"state {state!r} has no outgoing transition")
        self.state = state


class UnknownState(ModelError):
    def __init__(self, name: str, line: Optional[int] = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}unknown state {name!r}")
        self.name = name
        self.line = line


class EmptyProduct(Exception):
    """No initial product state is consistent with the model's initial label."""


@dataclass(frozen=True, eq=False)
class KripkeStructure:
    """Finite labelled transition system over dense state indices.

    ``init`` holds one or more initial states (products may have several);
    ``succ[s]`` is a sorted tuple of successors and ``labels[s]`` a frozenset
    of atomic propositions.
    """

    names: tuple
    init: tuple
    succ: tuple
    labels: tuple
    ap: frozenset
    total: bool = True

    def __post_init__(self):
        n = len(self.names)
        if not self.init or any(not 0 <= s < n for s in self.init):
            raise ModelError("initial state out of range")
        if len(self.succ) != n or len(self.labels) != n:
            raise ModelError("succ/labels length mismatch")
        for s, out in enumerate(self.succ):
            if len(set(out)) != len(out):
                raise ModelError(f"duplicate transition from {self.names[s]!r}")
            if self.total and not out:
                raise TotalityViolation(self.names[s])
        for lab in self.labels:
            if not lab <= self.ap:
                raise ModelError(f"label {sorted(lab)} outside AP")

    @classmethod
    def build(cls, names: Sequence[str], init, edges: Iterable[tuple], labels,
              ap: Optional[Iterable[str]] = None, total: bool = True) -> "KripkeStructure":
        """Build from state names, ``(src, dst)`` name or index pairs and a
        name->label mapping (or list aligned with ``names``)."""
        names = tuple(names)
        index = {nm: i for i, nm in enumerate(names)}

        def idx(x):
            if isinstance(x, int):
                return x
            if x not in index:
                raise UnknownState(x)
            return index[x]

        init = (init,) if isinstance(init, (str, int)) else tuple(init)
        succ = [set() for _ in names]
        for a, b in edges:
            succ[idx(a)].add(idx(b))
        if isinstance(labels, dict):
            labs = [frozenset(labels.get(nm, ())) for nm in names]
        else:
            labs = [frozenset(x) for x in labels]
        ap = frozenset(ap) if ap is not None else frozenset().union(*labs) if labs else frozenset()
        return cls(names, tuple(idx(s) for s in init), tuple(tuple(sorted(x)) for x in succ),
                   tuple(labs), ap, total)

    def __len__(self):
        return len(self.names)

    @property
    def initial_states(self) -> tuple:
        return self.init

    @property
    def n_transitions(self) -> int:
        return sum(len(x) for x in self.succ)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownState(name) from None

    def has_edge(self, s: int, t: int) -> bool:
        return t in self.succ[s]

    def satisfies(self, s: int, prop) -> bool:
        return eval_prop(prop, self.labels[s])

    def to_text(self) -> str:
        lines = ["states: " + " ".join(self.names),
                 "init: " + " ".join(self.names[s] for s in self.init)]
        edges = [f"{self.names[s]}->{self.names[t]}" for s in range(len(self)) for t in self.succ[s]]
        lines.append("trans: " + " ".join(edges))
        for s, nm in enumerate(self.names):
            lines.append(f"label: {nm}: " + " ".join(sorted(self.labels[s])))
        return "\n".join(lines) + "\n"

    def reachable(self, sources: Optional[Iterable[int]] = None) -> list:
        """States reachable from ``sources`` (default: initial states), BFS order."""
        seen = set()
        order = []
        queue = deque()
        for s in (self.init if sources is None else sources):
            if s not in seen:
                seen.add(s)
                queue.append(s)
        while queue:
            s = queue.popleft()
            order.append(s)
            for t in self.succ[s]:
                if t not in seen:
                    seen.add(t)
                    queue.append(t)
        return order


def parse_model(text: str) -> KripkeStructure:
    """Parse the line-oriented model format.

    ::

        states: s0 s1 s2
        init: s0
        trans: s0->s0 s0->s1 s1->s2 s2->s0
        label: s0: a
    """
    names: list = []
    init: list = []
    edges: list = []
    labels: dict = {}
    seen_states = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition(":")
        if not sep:
            raise ModelSyntaxError(f"expected 'key: value', got {line!r}", lineno)
        key = key.strip()
        if key == "states":
            toks = rest.split()
            if not toks:
                raise ModelSyntaxError("empty state list", lineno)
            for t in toks:
                if t in names:
                    raise ModelSyntaxError(f"duplicate state {t!r}", lineno)
                names.append(t)
            seen_states = True
        elif key == "init":
            toks = rest.split()
            if not toks:
                raise ModelSyntaxError("missing initial state", lineno)
            init.extend((t, lineno) for t in toks)
        elif key == "trans":
            for tok in rest.split():
                src, arrow, dst = tok.partition("->")
                if not arrow or not src or not dst:
                    raise ModelSyntaxError(f"bad transition {tok!r}", lineno)
                edges.append((src, dst, lineno))
        elif key == "label":
            state, sep2, props = rest.partition(":")
            state = state.strip()
            if not sep2 or not state:
                raise ModelSyntaxError("expected 'label: <state>: <props>'", lineno)
            labels.setdefault(state, [set(), lineno])[0].update(props.split())
        else:
            raise ModelSyntaxError(f"unknown key {key!r}", lineno)
    if not seen_states:
        raise ModelSyntaxError("missing 'states:' line", 0)
    if not init:
        raise ModelSyntaxError("missing 'init:' line", 0)
    known = set(names)
    for t, ln in init:
        if t not in known:
            raise UnknownState(t, ln)
    for a, b, ln in edges:
        for x in (a, b):
            if x not in known:
                raise UnknownState(x, ln)
    for st, (_, ln) in labels.items():
        if st not in known:
            raise UnknownState(st, ln)
    seen_edges = set()
    uniq_edges = []
    for a, b, _ in edges:
        if (a, b) not in seen_edges:
            seen_edges.add((a, b))
            uniq_edges.append((a, b))
    labs = {st: v[0] for st, v in labels.items()}
    return KripkeStructure.build(names, [t for t, _ in init], uniq_edges, labs)


def load_model(path) -> KripkeStructure:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())


# ---------------------------------------------------------------------------
# SCCs

@dataclass(frozen=True)
class SCC:
    members: frozenset
    trivial: bool

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(sorted(self.members))


def tarjan_sccs(K: KripkeStructure, B: Optional[Iterable[int]] = None) -> list:
    """Maximal SCCs of the subgraph induced by ``B`` (default: all states).

    Iterative Tarjan.  Result is ordered by smallest member index.
    """
    allowed = set(range(len(K))) if B is None else set(B)
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    out: list = []
    counter = 0
    for root in sorted(allowed):
        if root in index:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, i = work[-1]
            succ = K.succ[v]
            while i < len(succ) and succ[i] not in allowed:
                i += 1
            if i < len(succ):
                work[-1] = (v, i + 1)
                w = succ[i]
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, 0))
                elif w in on_stack:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.add(w)
                    if w == v:
                        break
                trivial = len(comp) == 1 and v not in K.succ[v]
                out.append(SCC(frozenset(comp), trivial))
    out.sort(key=lambda c: min(c.members))
    return out


def sub_model(K: KripkeStructure, B: Iterable[int], s: int) -> KripkeStructure:
    """``K`` restricted to ``B`` with initial state ``s``; states keep their
    names, the AP is carried over, and totality is not enforced."""
    members = sorted(set(B))
    if s not in members:
        raise ValueError("initial state must lie in B")
    pos = {x: i for i, x in enumerate(members)}
    succ = tuple(tuple(pos[t] for t in K.succ[x] if t in pos) for x in members)
    return KripkeStructure(
        tuple(K.names[x] for x in members), (pos[s],), succ,
        tuple(K.labels[x] for x in members), K.ap, total=False,
    )


# ---------------------------------------------------------------------------
# products

ACCEPTING = "accepting"


def fresh_accepting_name(ap: Iterable[str]) -> str:
    ap = set(ap)
    if ACCEPTING not in ap:
        return ACCEPTING
    name = "__" + ACCEPTING
    i = 0
    while name in ap:
        i += 1
        name = f"__{ACCEPTING}{i}"
    return name


@dataclass(frozen=True, eq=False)
class ProductStructure:
    """A product of a model with an automaton, viewed as a Kripke structure.

    ``pairs[i] = (kripke_state, automaton_state)``; ``accepting_prop`` names
    the proposition marking accepting automaton states.
    """

    kripke: KripkeStructure
    pairs: tuple
    accepting_prop: str
    base: KripkeStructure

    def project(self, states: Sequence[int]) -> list:
        return [self.pairs[i][0] for i in states]


def product(K: KripkeStructure, A, max_states: Optional[int] = None) -> ProductStructure:
    """Reachable synchronous product of ``K`` and Büchi automaton ``A``.

    The automaton reads the label of the *source* state: there is an edge
    ``(s, q) -> (s', q')`` when ``s -> s'`` in K and some edge ``q -> q'``
    of A has a guard satisfied by ``L(s)``.  Initial states are
    ``(s0, q0)`` for initial s0, q0.  Labels are ``L(s)`` plus the fresh
    accepting proposition when ``q`` is accepting.
    """
    acc_name = fresh_accepting_name(K.ap)
    out_edges = A.edges_from()
    index: dict = {}
    pairs: list = []
    succ: list = []
    queue = deque()

    def visit(pair):
        if pair not in index:
            if max_states is not None and len(pairs) >= max_states:
                from .buchi import TranslationCapExceeded
                raise TranslationCapExceeded(len(pairs))
            index[pair] = len(pairs)
            pairs.append(pair)
            succ.append(None)
            queue.append(pair)
        return index[pair]

    init = tuple(dict.fromkeys(visit((s0, q0)) for s0 in K.init for q0 in sorted(A.initial)))
    while queue:
        s, q = pair = queue.popleft()
        lab = K.labels[s]
        targets = set()
        qs = [q2 for guard, q2 in out_edges[q] if eval_prop(guard, lab)]
        for t in K.succ[s]:
            for q2 in qs:
                targets.add(visit((t, q2)))
        succ[index[pair]] = tuple(sorted(targets))
    if not pairs:
        raise EmptyProduct("automaton has no initial state")
    labels = tuple(K.labels[s] | ({acc_name} if q in A.accepting else frozenset())
                   for s, q in pairs)
    names = tuple(f"({K.names[s]},q{q})" for s, q in pairs)
    PK = KripkeStructure(names, init, tuple(succ), labels, K.ap | {acc_name}, total=False)
    return ProductStructure(PK, tuple(pairs), acc_name, K)
