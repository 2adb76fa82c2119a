"""Benchmark models, formula patterns and a timing harness.

Models (atoms are 1-based, one process moves per step):

* ``gen_pd(n)``: dining philosophers around a table of ``n`` forks.
  Philosopher ``i`` cycles think -> ready -> eat -> think; ready -> eat picks
  up both forks atomically and is enabled only when neither neighbour eats.
  Atoms ``ready_i`` and ``eat_i``.  Initially everyone thinks.
* ``gen_bs(n)``: ``n`` processes sharing a binary semaphore.  Process ``i``
  cycles idle -> enter -> critical -> idle; enter -> critical takes the
  semaphore, critical -> idle releases it.  Atoms ``enter_i`` and
  ``critical_i``.  Initially all idle with the semaphore free.

Pattern placeholders map onto a family's request/grant atoms ``(x, y)``
(``ready``/``eat`` or ``enter``/``critical``), indices taken mod ``n``::

    a_i -> x_i    b_i -> y_i    c_i -> x_{i+1}    d_i -> y_{i+1}
"""
from __future__ import annotations

import csv
import io
import itertools
import multiprocessing as mp
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .checker import EngineStats, check_fair, check_under_fairness, classic_mc
from .kripke import KripkeStructure
from .ltl import Formula, Implies, Until, conj, disj, negate, parse, to_pnf

FAMILIES = ("PD", "BS")
ENGINES = ("fair", "classic")
SPEC_PATTERNS = ("Spec1", "Spec2", "Spec3")
PATTERNS = SPEC_PATTERNS + tuple(f"p{i}" for i in range(1, 17))
CSV_HEADER = ("family", "n", "pattern", "engine", "verdict", "wall_ms", "aut_states",
              "prod_states", "sccs", "disjuncts", "fallback")
DEFAULT_BUDGET_MS = 60_000

_ATOMS = {"PD": ("ready", "eat"), "BS": ("enter", "critical")}


class UnknownPattern(ValueError):
    pass


# ---------------------------------------------------------------------------
# models

def _explore(n: int, init: tuple, moves: Callable[[tuple], list],
             label: Callable[[tuple], frozenset], ap: Iterable[str]) -> KripkeStructure:
    index = {init: 0}
    order = [init]
    succ = []
    i = 0
    while i < len(order):
        st = order[i]
        outs = []
        for nxt in moves(st):
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
            outs.append(index[nxt])
        succ.append(tuple(sorted(set(outs))))
        i += 1
    names = tuple("".join(str(x) for x in st) for st in order)
    labels = tuple(label(st) for st in order)
    return KripkeStructure(names, (0,), tuple(succ), labels, frozenset(ap))


THINK, READY, EAT = 0, 1, 2


def gen_pd(n: int) -> KripkeStructure:
    """Dining philosophers; state name digits are phases (0 think, 1 ready, 2 eat)."""
    if not 2 <= n <= 12:
        raise ValueError("philosopher count must be in 2..12")

    def moves(st):
        out = []
        for i, ph in enumerate(st):
            if ph == THINK:
                nxt = READY
            elif ph == READY:
                if st[(i - 1) % n] == EAT or st[(i + 1) % n] == EAT:
                    continue
                nxt = EAT
            else:
                nxt = THINK
            out.append(st[:i] + (nxt,) + st[i + 1:])
        return out

    def label(st):
        return frozenset(
            f"ready_{i + 1}" if ph == READY else f"eat_{i + 1}"
            for i, ph in enumerate(st) if ph != THINK
        )

    ap = [f"{x}_{i}" for i in range(1, n + 1) for x in _ATOMS["PD"]]
    return _explore(n, (THINK,) * n, moves, label, ap)


IDLE, ENTER, CRITICAL = 0, 1, 2


def gen_bs(n: int) -> KripkeStructure:
    """Binary semaphore; state name digits are phases (0 idle, 1 enter, 2 critical)."""
    if not 2 <= n <= 16:
        raise ValueError("process count must be in 2..16")

    def moves(st):
        taken = CRITICAL in st
        out = []
        for i, ph in enumerate(st):
            if ph == IDLE:
                nxt = ENTER
            elif ph == ENTER:
                if taken:
                    continue
                nxt = CRITICAL
            else:
                nxt = IDLE
            out.append(st[:i] + (nxt,) + st[i + 1:])
        return out

    def label(st):
        return frozenset(
            f"enter_{i + 1}" if ph == ENTER else f"critical_{i + 1}"
            for i, ph in enumerate(st) if ph != IDLE
        )

    ap = [f"{x}_{i}" for i in range(1, n + 1) for x in _ATOMS["BS"]]
    return _explore(n, (IDLE,) * n, moves, label, ap)


def gen_model(family: str, n: int) -> KripkeStructure:
    if family == "PD":
        return gen_pd(n)
    if family == "BS":
        return gen_bs(n)
    raise ValueError(f"unknown model family {family!r}")


# ---------------------------------------------------------------------------
# patterns

_TEMPLATES = {
    "p1": ("and", "F G a"),
    "p2": ("and", "G F a"),
    "p3": ("and-1", "G F a | F G a'"),
    "p4": ("or", "F G a"),
    "p5": ("or", "(F G a | G F b) & (F G c | G F d)"),
    "p6": ("and", "(F G a | G F b) & (F G c | G F d)"),
    "p7": ("and", "(G F (a & X X b) | F G b) & F G (c | (X d & X X b))"),
    "p8": ("or", "(G F (a & X X b) | F G b) & F G (c | (X d & X X b))"),
    "p9": ("and", "F G (a | c | (a U b) | (c U d))"),
    "p10": ("or", "F G (a | c | (a U b) | (c U d))"),
    "p11": ("or", "F G (a | (a U b)) | G F (c & (c U d))"),
    "p12": ("and", "F G (a | (a U b)) | G F (c & (c U d))"),
    "p13": ("and", "F G ((a & X X b & G F b) U (G (X X !c | X X (a & b))))"),
    "p14": ("and", "G (F !a & F (b & X !c) & G F (a U d)) & G F ((X d) U (b | G c))"),
}


def _placeholder(letter: str, i: int, n: int, family: Optional[str]) -> str:
    """Atom for placeholder ``letter`` at (1-based) index ``i``."""
    if family is None:
        return f"{letter}_{i}"
    x, y = _ATOMS[family]
    shift = {"a": 0, "b": 0, "c": 1, "d": 1}[letter]
    atom = x if letter in "ac" else y
    return f"{atom}_{(i - 1 + shift) % n + 1}"


def _instantiate(template: str, i: int, n: int, family: Optional[str]) -> Formula:
    # a' is a_{i+1}; rename before the other placeholders
    ren = {"a'": _placeholder("a", i + 1, n, family)}
    for letter in "abcd":
        ren[letter] = _placeholder(letter, i, n, family)
    toks = []
    for tok in template.replace("(", " ( ").replace(")", " ) ").replace("!", " ! ").split():
        toks.append(ren.get(tok, tok))
    return parse(" ".join(toks).replace("! ", "!"))


def _spec(pattern: str, n: int, family: Optional[str]) -> tuple:
    """``(assumption, guarantee)`` of a Spec pattern."""
    family = family or ("PD" if pattern == "Spec1" else "BS")
    x, y = _ATOMS[family]
    assumption = conj(
        to_pnf(Implies(parse(f"G F {x}_{i}"), parse(f"G F {y}_{i}"))) for i in range(1, n + 1)
    )
    if pattern == "Spec3":
        if n < 3:
            raise ValueError("Spec3 needs at least 3 processes")
        guarantee = parse(f"(!{y}_1 & !{y}_3) U {y}_2")
    else:
        guarantee = parse(f"F {y}_1")
    return assumption, guarantee


def spec_parts(pattern: str, n: int, family: Optional[str] = None) -> tuple:
    if pattern not in SPEC_PATTERNS:
        raise UnknownPattern(pattern)
    return _spec(pattern, n, family)


def gen_pattern(pattern: str, n: int, family: Optional[str] = None) -> Formula:
    """Instantiate ``pattern`` for size ``n``.

    Without ``family`` the placeholders stay as atoms ``a_i``, ``b_i``, ...
    (Spec patterns default to the PD atoms for Spec1 and BS for the others).
    """
    if n < 1:
        raise ValueError("n must be positive")
    if pattern in SPEC_PATTERNS:
        assumption, guarantee = _spec(pattern, n, family)
        return to_pnf(Implies(assumption, guarantee))
    if pattern in ("p15", "p16"):
        return negate(gen_pattern("p13" if pattern == "p15" else "p14", n, family))
    if pattern not in _TEMPLATES:
        raise UnknownPattern(pattern)
    mode, template = _TEMPLATES[pattern]
    top = n - 1 if mode == "and-1" else n
    parts = [_instantiate(template, i, n, family) for i in range(1, top + 1)]
    if not parts:
        raise ValueError(f"{pattern} needs n >= 2")
    return disj(parts) if mode == "or" else conj(parts)


def until_blowup_formula(p: int, q: int) -> Formula:
    """``psi1 U psi2`` with ``psi1`` a disjunction of pairs ``GF a_i & GF a_{i+1}``
    and ``psi2`` a conjunction of pairs ``GF b_j | GF b_{j+1}``; pairs are
    disjoint, so ``p`` and ``q`` must be even."""
    if p % 2 or q % 2 or p < 2 or q < 2:
        raise ValueError("p and q must be even and at least 2")
    lhs = disj(parse(f"G F a{i} & G F a{i + 1}") for i in range(1, p, 2))
    rhs = conj(parse(f"G F b{i} | G F b{i + 1}") for i in range(1, q, 2))
    return Until(lhs, rhs)


# ---------------------------------------------------------------------------
# harness

@dataclass(frozen=True)
class BenchCase:
    family: str
    n: int
    pattern: str
    engine: str

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown model family {self.family!r}")
        if self.pattern not in PATTERNS:
            raise UnknownPattern(self.pattern)
        if self.engine not in ENGINES:
            raise ValueError(f"unknown engine {self.engine!r}")


@dataclass(frozen=True)
class BenchResult:
    case: BenchCase
    verdict: Optional[bool]
    stats: EngineStats = field(default_factory=EngineStats)
    timeout: bool = False
    error: str = ""

    def row(self) -> tuple:
        c, s = self.case, self.stats
        if self.timeout:
            verdict = "timeout"
        elif self.error:
            verdict = "error"
        else:
            verdict = "holds" if self.verdict else "violated"
        return (c.family, c.n, c.pattern, c.engine, verdict, round(s.wall_time * 1000, 3),
                s.automaton_states_built, s.product_states_built, s.sccs_examined,
                s.disjuncts_checked, s.fallback or self.error)


def run_case(case: BenchCase) -> BenchResult:
    """Run one case in-process."""
    K = gen_model(case.family, case.n)
    t0 = time.perf_counter()
    if case.pattern in SPEC_PATTERNS:
        assumption, guarantee = _spec(case.pattern, case.n, case.family)
        if case.engine == "fair":
            v = check_under_fairness(guarantee, assumption, K)
        else:
            v = classic_mc(to_pnf(Implies(assumption, guarantee)), K)
    else:
        phi = gen_pattern(case.pattern, case.n, case.family)
        v = check_fair(phi, K) if case.engine == "fair" else classic_mc(phi, K)
    v.stats.wall_time = time.perf_counter() - t0
    return BenchResult(case, v.holds, v.stats)


def _child(case, queue):
    try:
        queue.put(run_case(case))
    except Exception as exc:  # reported, never raised across the process boundary
        queue.put(BenchResult(case, None, error=f"{type(exc).__name__}: {exc}"))


def _run_with_budget(case: BenchCase, budget_ms: Optional[int]) -> BenchResult:
    if budget_ms is None:
        try:
            return run_case(case)
        except Exception as exc:
            return BenchResult(case, None, error=f"{type(exc).__name__}: {exc}")
    ctx = mp.get_context("fork") if "fork" in mp.get_all_start_methods() else mp.get_context()
    queue = ctx.Queue()
    proc = ctx.Process(target=_child, args=(case, queue), daemon=True)
    t0 = time.perf_counter()
    proc.start()
    try:
        result = queue.get(timeout=budget_ms / 1000)
    except Exception:
        result = None
    proc.join(1)
    if proc.is_alive():
        proc.kill()
        proc.join()
    if result is None:
        stats = EngineStats(wall_time=time.perf_counter() - t0)
        return BenchResult(case, None, stats, timeout=True)
    return result


def run_suite(cases: Sequence[BenchCase], budget_ms: Optional[int] = DEFAULT_BUDGET_MS,
              out=None) -> list:
    """Run every case (each in its own process when a budget is given) and
    write the CSV to ``out`` (a path or text stream) if provided."""
    results = [_run_with_budget(c, budget_ms) for c in cases]
    if out is not None:
        if isinstance(out, (str, bytes)) or hasattr(out, "__fspath__"):
            with open(out, "w", newline="", encoding="utf-8") as fh:
                write_csv(results, fh)
        else:
            write_csv(results, out)
    return results


def write_csv(results: Iterable[BenchResult], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in results:
        w.writerow(r.row())


def csv_text(results: Iterable[BenchResult]) -> str:
    buf = io.StringIO()
    write_csv(results, buf)
    return buf.getvalue()


def make_cases(families: Iterable[str], sizes: Iterable[int], patterns: Iterable[str],
               engines: Iterable[str] = ENGINES) -> list:
    return [BenchCase(f, n, p, e)
            for f, n, p, e in itertools.product(families, sizes, patterns, engines)]


def disagreements(results: Iterable[BenchResult]) -> list:
    """Cases whose completed engines returned different verdicts."""
    by_case: dict = {}
    for r in results:
        if r.timeout or r.error:
            continue
        c = r.case
        by_case.setdefault((c.family, c.n, c.pattern), set()).add(r.verdict)
    return sorted(k for k, v in by_case.items() if len(v) > 1)
