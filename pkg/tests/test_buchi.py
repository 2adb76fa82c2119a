import random

import pytest
from hypothesis import given

from conftest import lassos, seeds
from fairltl.buchi import (
    BuchiAutomaton, TranslationCapExceeded, accepts_lasso, hand_built_automaton,
    translate, universal_automaton,
)
from fairltl.ltl import FALSE, TRUE, LassoWord, eval_lasso, negate, parse
from fairltl.sampling import random_formula, random_lasso

HAND_BUILT_FORMULA = parse("F G (a | X (b U c))")


def L(prefix, loop):
    return LassoWord(tuple(frozenset(x) for x in prefix), tuple(frozenset(x) for x in loop))


def test_finally_automaton():
    A = translate(parse("F a"))
    assert A.n_states == 2
    assert accepts_lasso(A, L(["", "", "a"], [""]))
    assert not accepts_lasso(A, L([], [""]))


def test_hand_built_structure():
    A = hand_built_automaton()
    assert A.n_states == 4 and A.initial == {0} and A.accepting == {1, 2}
    guards = {(s, d): g for s, g, d in A.edges}
    assert len(guards) == 11
    assert guards[(0, 0)] == TRUE
    assert guards[(2, 3)] == parse("b & !c")
    assert guards[(3, 2)] == parse("!a & c")
    assert hand_built_automaton(negated_c_guard=True).edges != A.edges


def test_hand_built_examples():
    A = hand_built_automaton()
    assert accepts_lasso(A, L([], ["a", "", "ac"]))
    assert accepts_lasso(A, L([], ["a"]))


def test_negated_c_guard_disagrees_with_formula():
    variant = hand_built_automaton(negated_c_guard=True)
    only_b, b_then_c = L([], ["b"]), L([], ["b", "c"])
    assert not eval_lasso(only_b, HAND_BUILT_FORMULA) and accepts_lasso(variant, only_b)
    assert eval_lasso(b_then_c, HAND_BUILT_FORMULA) and not accepts_lasso(variant, b_then_c)


@given(lassos(max_prefix=4, max_loop=6))
def test_hand_built_language(w):
    assert accepts_lasso(hand_built_automaton(), w) == eval_lasso(w, HAND_BUILT_FORMULA)


@given(lassos(max_prefix=4, max_loop=6))
def test_translation_of_hand_built_formula(w):
    assert accepts_lasso(translate(HAND_BUILT_FORMULA), w) == eval_lasso(w, HAND_BUILT_FORMULA)


def test_false_guards_accept_nothing():
    A = BuchiAutomaton(1, frozenset({0}), ((0, FALSE, 0),), frozenset({0}))
    assert not accepts_lasso(A, L([], ["a"]))
    assert not accepts_lasso(translate(FALSE), L([], [""]))


def test_universal_automaton():
    A = universal_automaton()
    assert accepts_lasso(A, L(["b"], ["a", ""]))


@given(seeds, lassos())
def test_translation_agrees_with_evaluation(seed, w):
    phi = random_formula(random.Random(seed), 3, ops="full_w")
    assert accepts_lasso(translate(phi), w) == eval_lasso(w, phi)


@given(seeds, lassos())
def test_negations_have_disjoint_languages(seed, w):
    phi = random_formula(random.Random(seed), 3)
    assert not (accepts_lasso(translate(phi), w) and accepts_lasso(translate(negate(phi)), w))


@given(seeds)
def test_co_safety_automata_are_terminal(seed):
    rng = random.Random(seed)
    A = translate(random_formula(rng, 4, ops="ux"))
    assert A.terminal <= A.accepting
    out = A.edges_from()
    for q in A.terminal:
        assert (TRUE, q) in out[q]
    # acceptance persists: any word that reaches a terminal state is accepted
    for q in A.terminal:
        for _ in range(5):
            w = random_lasso(rng)
            B = BuchiAutomaton(A.n_states, frozenset({q}), A.edges, A.accepting, A.terminal)
            assert accepts_lasso(B, w)


def test_state_cap():
    with pytest.raises(TranslationCapExceeded) as exc:
        translate(parse("G F a & G F b & G F c & F G (a | X (b U c))"), cap=3)
    assert exc.value.states >= 3


def test_text_dumps():
    A = translate(parse("F a"))
    text = A.to_text()
    assert text.startswith("states: 2\ninitial: q0\naccepting: q1")
    hoa = A.to_hoa("Fa")
    assert "Acceptance: 1 Inf(0)" in hoa and 'AP: 1 "a"' in hoa and hoa.rstrip().endswith("--END--")
