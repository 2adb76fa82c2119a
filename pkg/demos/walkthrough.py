"""Walk one small model through normal forms, both engines and a witness."""
from pathlib import Path

from fairltl.buchi import hand_built_automaton
from fairltl.checker import check_fair, classic_mc, format_lasso, format_trace
from fairltl.kripke import parse_model, product
from fairltl.ltl import Not, parse, parse_pnf, to_pnf
from fairltl.transform import fair_normal_form, flatten_fg

K = parse_model((Path(__file__).parent / "three_state.kripke").read_text())

phi = parse("F G (a | (F b & G c))")
print("formula:       ", phi)
print("flattened:     ", flatten_fg(phi))

neg = parse_pnf("!(F G (a | (F b & G c)))")
for name, engine in (("fair", check_fair), ("classic", classic_mc)):
    v = engine(neg, K)
    s = v.stats
    print(f"{name:8} {'holds' if v.holds else 'violated'}  automaton={s.automaton_states_built} "
          f"product={s.product_states_built} sccs={s.sccs_examined}")
    print("   ", format_lasso(K, v.witness))
    print("   ", format_trace(K, v.witness))

general = to_pnf(Not(parse("!(F G (a | (X (b U c) & F !b)))")))
print("general form:  ", fair_normal_form(general))

P = product(K, hand_built_automaton())
print("product states:", ", ".join(P.kripke.names))
