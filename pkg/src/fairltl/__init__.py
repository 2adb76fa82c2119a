"""Explicit-state model checking of LTL fairness properties."""
from .ltl import (
    FALSE, TRUE, And, Atom, Finally, Formula, Fragment, Globally, Implies,
    LassoWord, LTLSyntaxError, NegAtom, Next, Not, Or, Until, WeakUntil,
    classify_fragment, eliminate_w, eval_lasso, is_fairness_bounded, negate,
    parse, parse_pnf, simplify, to_pnf, to_string,
)

__version__ = "0.1.0"
