"""Seeded random generators for formulas, lassos and small models.

Used by the test suite, the demos and the differential harness.
"""
from __future__ import annotations

import random
from typing import Sequence

from .ltl import (
    FALSE, TRUE, And, Atom, Finally, Formula, Globally, LassoWord, NegAtom,
    Next, Or, Until, WeakUntil,
)

DEFAULT_AP = ("a", "b", "c")


def random_literal(rng: random.Random, ap: Sequence[str] = DEFAULT_AP,
                   constants: bool = False) -> Formula:
    if constants and rng.random() < 0.08:
        return rng.choice((TRUE, FALSE))
    name = rng.choice(list(ap))
    return Atom(name) if rng.random() < 0.6 else NegAtom(name)


def random_propositional(rng: random.Random, depth: int,
                         ap: Sequence[str] = DEFAULT_AP) -> Formula:
    if depth <= 0 or rng.random() < 0.35:
        return random_literal(rng, ap)
    op = rng.choice((And, Or))
    return op(random_propositional(rng, depth - 1, ap), random_propositional(rng, depth - 1, ap))


_OPS = {
    "fg": (And, Or, Finally, Globally),
    "ux": (And, Or, Next, Until),
    "full": (And, Or, Next, Until, Finally, Globally),
    "full_w": (And, Or, Next, Until, WeakUntil, Finally, Globally),
}


def random_formula(rng: random.Random, depth: int, ap: Sequence[str] = DEFAULT_AP,
                   ops: str = "full", constants: bool = False) -> Formula:
    """Random PNF formula of nesting depth at most ``depth``.

    ``ops`` picks the operator set: ``fg``, ``ux``, ``full`` or ``full_w``.
    """
    if depth <= 0 or rng.random() < 0.25:
        return random_literal(rng, ap, constants)
    op = rng.choice(_OPS[ops])
    if op in (Next, Finally, Globally):
        return op(random_formula(rng, depth - 1, ap, ops, constants))
    return op(random_formula(rng, depth - 1, ap, ops, constants),
              random_formula(rng, depth - 1, ap, ops, constants))


def random_fairness(rng: random.Random, depth: int, ap: Sequence[str] = DEFAULT_AP,
                    ops: str = "fg") -> Formula:
    """A formula that is a fairness by construction.

    Leaves are ``G F body`` or ``F G body`` for arbitrary bodies; fairness
    is closed under ``&``, ``|``, ``F`` and ``G`` so any combination on top
    stays a fairness.  Total nesting depth is at most ``depth`` (>= 2).
    """
    depth = max(depth, 2)
    if depth == 2 or rng.random() < 0.3:
        body = random_formula(rng, depth - 2, ap, ops)
        return Globally(Finally(body)) if rng.random() < 0.5 else Finally(Globally(body))
    op = rng.choice((And, Or, And, Or, Finally, Globally))
    if op in (Finally, Globally):
        return op(random_fairness(rng, depth - 1, ap, ops))
    return op(random_fairness(rng, depth - 1, ap, ops), random_fairness(rng, depth - 1, ap, ops))


def random_lasso(rng: random.Random, ap: Sequence[str] = DEFAULT_AP, max_prefix: int = 4,
                 max_loop: int = 6, min_prefix: int = 0) -> LassoWord:
    return LassoWord.random(rng, ap, max_prefix=max_prefix, max_loop=max_loop,
                            min_prefix=min_prefix)


def random_model_text(rng: random.Random, n_states: int, ap: Sequence[str] = DEFAULT_AP,
                      max_out: int = 2) -> str:
    """Random total Kripke structure in the model text format."""
    names = [f"s{i}" for i in range(n_states)]
    lines = ["states: " + " ".join(names), "init: s0"]
    edges = []
    for i in range(n_states):
        k = rng.randint(1, min(max_out, n_states))
        for j in sorted(rng.sample(range(n_states), k)):
            edges.append(f"s{i}->s{j}")
    lines.append("trans: " + " ".join(edges))
    for name in names:
        lab = [a for a in ap if rng.random() < 0.5]
        lines.append(f"label: {name}: " + " ".join(lab))
    return "\n".join(lines) + "\n"


def random_model(rng: random.Random, n_states: int, ap: Sequence[str] = DEFAULT_AP,
                 max_out: int = 2):
    from .kripke import parse_model
    return parse_model(random_model_text(rng, n_states, ap, max_out))


def random_linear_growth(rng: random.Random, depth: int, ap: Sequence[str] = DEFAULT_AP) -> Formula:
    """Random member of the linear-growth grammar: disjunctions of F/G/&
    combinations over LTL(U,X) leaves."""
    if depth > 1 and rng.random() < 0.3:
        return Or(random_linear_growth(rng, depth - 1, ap), random_linear_growth(rng, depth - 1, ap))
    return _random_phi0(rng, depth, ap)


def _random_phi0(rng: random.Random, depth: int, ap: Sequence[str]) -> Formula:
    if depth <= 1 or rng.random() < 0.25:
        return random_formula(rng, max(depth - 1, 0), ap, ops="ux")
    op = rng.choice((Finally, Globally, And))
    if op is And:
        return And(_random_phi0(rng, depth - 1, ap), _random_phi0(rng, depth - 1, ap))
    return op(_random_phi0(rng, depth - 1, ap))
