import random

import pytest
from hypothesis import given, strategies as st

from conftest import lassos, seeds
from oracles import naive_eval
from fairltl.ltl import (
    FALSE, TRUE, And, Atom, FairnessScreen, Finally, Fragment, Globally, Implies,
    LassoWord, LTLSyntaxError, NegAtom, Next, Not, Or, Until, WeakUntil, atoms,
    classify_fragment, eliminate_w, equal_modulo_ac, eval_lasso, eval_prop,
    is_fairness_bounded, negate, parse, parse_pnf, positions_satisfying, simplify,
    size, to_pnf, to_string,
)
from fairltl.sampling import random_fairness, random_formula

a, b, c = Atom("a"), Atom("b"), Atom("c")


def W(*letters):
    return tuple(frozenset(x) for x in letters)


# ---------------------------------------------------------------- parsing

def test_parse_nested_example():
    assert parse("F G (a | (F b & G c))") == Finally(Globally(Or(a, And(Finally(b), Globally(c)))))


def test_parse_atom():
    assert parse("a") == a


def test_until_is_right_associative():
    assert parse("a U b U c") == Until(a, Until(b, c))
    assert parse("a W b U c") == WeakUntil(a, Until(b, c))


def test_precedence_levels():
    assert parse("a | b & c") == Or(a, And(b, c))
    assert parse("a & b U c") == And(a, Until(b, c))
    assert parse("a -> b | c") == Implies(a, Or(b, c))
    assert parse("a -> b -> c") == Implies(a, Implies(b, c))
    assert parse("X a U b") == Until(Next(a), b)
    assert parse("! (a & b)") == Not(And(a, b))


def test_keywords_and_negated_atoms():
    assert parse("true & false") == And(TRUE, FALSE)
    assert parse("!a") == NegAtom("a")
    assert parse("!!a") == Not(NegAtom("a"))


def test_identifier_shape():
    assert parse("ready_1 & eat_12") == And(Atom("ready_1"), Atom("eat_12"))
    # without spaces the operator letter is part of the identifier
    assert parse("aUb") == Atom("aUb")


@pytest.mark.parametrize("text,offset", [
    ("", 0), ("a &", 3), ("(a | b", 6), ("a b", 2), ("F", 1), ("a $ b", 2), ("U a", 0),
])
def test_syntax_errors_carry_offset(text, offset):
    with pytest.raises(LTLSyntaxError) as exc:
        parse(text)
    assert exc.value.offset == offset
    assert exc.value.expected


def test_syntax_error_is_a_syntax_error():
    assert issubclass(LTLSyntaxError, SyntaxError)


@given(seeds, st.sampled_from(["full", "full_w", "fg", "ux"]), st.booleans())
def test_print_parse_roundtrip(seed, ops, full):
    phi = random_formula(random.Random(seed), 5, ops=ops, constants=True)
    assert parse(to_string(phi, full_parens=full)) == phi


def test_printer_forms():
    phi = parse("F G (a | (F b & G c))")
    assert to_string(phi) == "F G (a | F b & G c)"
    assert to_string(phi, full_parens=True) == "F G (a | (F b & G c))"
    assert to_string(parse("a & b | c"), full_parens=True) == "((a & b) | c)"


# ---------------------------------------------------------------- normal forms

def test_pnf_until_dual():
    assert to_pnf(Not(Until(a, b))) == WeakUntil(And(a, NegAtom("b")), And(NegAtom("a"), NegAtom("b")))


def test_pnf_double_negation():
    assert to_pnf(Not(Not(a))) == a


def test_pnf_negated_fairness():
    got = parse_pnf("!(F G (!a | (!b U !c)))")
    assert got == parse("G F (a & ((!b & c) W (b & c)))")


def test_pnf_implication_and_next():
    assert parse_pnf("a -> X b") == Or(NegAtom("a"), Next(b))
    assert parse_pnf("!X a") == Next(NegAtom("a"))
    assert parse_pnf("!F a") == Globally(NegAtom("a"))
    assert parse_pnf("!G a") == Finally(NegAtom("a"))


def test_negate_examples():
    phi = parse_pnf("!(F G (a | (F b & G c)))")
    assert negate(phi) == parse("F G (a | (F b & G c))")
    assert negate(TRUE) == FALSE


@given(seeds, lassos())
def test_pnf_sound_against_raw_evaluation(seed, w):
    rng = random.Random(seed)
    raw = random_formula(rng, 4, ops="full_w")
    raw = Not(Implies(raw, random_formula(rng, 3, ops="full")))
    assert eval_lasso(w, to_pnf(raw)) == naive_eval(w, raw)


@given(seeds, lassos())
def test_negation_flips_truth(seed, w):
    phi = random_formula(random.Random(seed), 5, ops="full_w", constants=True)
    assert eval_lasso(w, phi) != eval_lasso(w, negate(phi))
    assert eval_lasso(w, negate(negate(phi))) == eval_lasso(w, phi)


def test_eliminate_w_example():
    got = eliminate_w(parse("(!b & c) W (b & c)"))
    assert got == parse("G (!b & c) | ((!b & c) U (b & c))")


def test_weak_until_false_simplifies_to_globally():
    assert simplify(eliminate_w(parse("a W false"))) == Globally(a)


@given(seeds, lassos())
def test_eliminate_w_and_simplify_preserve_semantics(seed, w):
    phi = random_formula(random.Random(seed), 5, ops="full_w", constants=True)
    assert eval_lasso(w, eliminate_w(phi)) == eval_lasso(w, phi)
    assert eval_lasso(w, simplify(phi)) == eval_lasso(w, phi)


def test_simplify_constants_and_duplicates():
    assert simplify(parse("a & true")) == a
    assert simplify(parse("a | true")) == TRUE
    assert simplify(parse("a & a")) == a
    assert simplify(parse("a & !a")) == FALSE
    assert simplify(parse("F F a")) == Finally(a)
    assert simplify(parse("a U false")) == FALSE


def test_equal_modulo_ac():
    assert equal_modulo_ac(parse("(a & b) | c"), parse("c | (b & a)"))
    assert equal_modulo_ac(parse("a & (b & c)"), parse("(c & a) & b"))
    assert not equal_modulo_ac(parse("a U b"), parse("b U a"))
    # structural equality stays strict
    assert parse("a & b") != parse("b & a")


def test_size_and_atoms():
    phi = parse("F G (a | (F b & G c))")
    assert size(phi) == 9
    assert atoms(phi) == {"a", "b", "c"}


# ---------------------------------------------------------------- evaluation

def test_eval_examples():
    phi = parse("F G (a | X (b U c))")
    assert eval_lasso(LassoWord((), W("a", "", "ac")), phi)
    assert not eval_lasso(LassoWord((), W("a", "ac", "")), phi)
    assert not eval_lasso(LassoWord((), W("")), Globally(a))
    assert eval_lasso(LassoWord((), W("a")), Globally(a))


def test_absent_atoms_are_false():
    w = LassoWord(W("b"), W("b"))
    assert eval_lasso(w, NegAtom("zzz"))
    assert not eval_lasso(w, Atom("zzz"))
    assert eval_prop(parse("b & !zzz"), frozenset({"b"}))


def test_positions_satisfying():
    w = LassoWord(W(""), W("a", "b"))
    assert positions_satisfying(w, a) == [1]
    assert positions_satisfying(w, parse("F b")) == [0, 1, 2]


def test_empty_loop_rejected():
    with pytest.raises(ValueError):
        LassoWord(W("a"), ())


@given(seeds, lassos())
def test_eval_matches_naive_oracle(seed, w):
    phi = random_formula(random.Random(seed), 5, ops="full_w", constants=True)
    assert eval_lasso(w, phi) == naive_eval(w, phi)


@given(seeds, lassos())
def test_f_and_g_are_definable(seed, w):
    phi = random_formula(random.Random(seed), 4)
    assert eval_lasso(w, Finally(phi)) == eval_lasso(w, Until(TRUE, phi))
    assert eval_lasso(w, Globally(phi)) == eval_lasso(w, WeakUntil(phi, FALSE))


@given(seeds, lassos(), st.integers(0, 5), st.integers(0, 5))
def test_fairness_invariant_under_prefix_change_and_rotation(seed, w, drop, rot):
    phi = random_fairness(random.Random(seed), 4, ops="full")
    k = rot % len(w.loop)
    rotated = LassoWord((), w.loop[k:] + w.loop[:k])
    shorter = LassoWord(w.prefix[min(drop, len(w.prefix)):], w.loop)
    v = eval_lasso(w, phi)
    assert eval_lasso(rotated, phi) == v
    assert eval_lasso(shorter, phi) == v


# ---------------------------------------------------------------- fragments and screen

@pytest.mark.parametrize("text,frag", [
    ("a & !b", Fragment.PROPOSITIONAL),
    ("G F a & F G b", Fragment.LTL_FG),
    ("X (b U c)", Fragment.LTL_UX),
    ("F G (a | X (b U c))", Fragment.FULL),
    ("a W b", Fragment.FULL),
])
def test_classify_fragment(text, frag):
    assert classify_fragment(parse(text)) == frag


def test_screen_refutes_atom():
    res = is_fairness_bounded(a)
    assert res.status == FairnessScreen.CONFIRMED_NOT and res.refuted
    w = res.counterexample
    v = eval_lasso(w, a)
    assert v != eval_lasso(w, Globally(a)) or v != eval_lasso(w, Finally(a))


def test_screen_refutes_until():
    assert is_fairness_bounded(parse("a U b")).status == FairnessScreen.CONFIRMED_NOT


@pytest.mark.parametrize("text", ["F a | G !a", "F G (a | X (b U c))", "G F a & F G b"])
def test_screen_does_not_refute_fairness(text):
    res = is_fairness_bounded(parse_pnf(text))
    assert res.status == FairnessScreen.NOT_REFUTED
    assert res.counterexample is None and res.samples == 200
