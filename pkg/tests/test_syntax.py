from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ecscasp import ec
from ecscasp.syntax import (
    AbducibleError,
    Constraint,
    Lit,
    NonLinearError,
    ScaspSyntaxError,
    expand_abducibles,
    load_program,
    load_text,
    normalize,
    parse_program,
    parse_query,
    rules_variant,
)
from ecscasp.terms import Compound, Const, Rat, Var, mk_list, term_str


def test_single_fact():
    prog = parse_program("p(a).")
    assert len(prog.rules) == 1
    r = prog.rules[0]
    assert r.head == Lit(Compound("p", (Const("a"),)))
    assert r.body == ()


def test_missing_period_is_an_error():
    with pytest.raises(ScaspSyntaxError):
        parse_program("p :- q")


def test_error_reports_position():
    with pytest.raises(ScaspSyntaxError) as e:
        parse_program("p.\nq :- ,r.")
    assert e.value.line == 2


def test_light_narrative_clause_count():
    prog = parse_program(ec.example_path("light").read_text())
    assert len(prog.rules) == 11
    assert prog.includes == ["bec_theory"]
    red = [r for r in prog.rules if r.head and term_str(r.head.atom).startswith("trajectory(on,T1,red")]
    assert len(red) == 1
    assert str(red[0]) == "trajectory(on,T1,red,T2) :- T1.<.T2, T2.<.T1+1."


def test_linear_expression_with_rational_coefficients():
    prog = parse_program("t(X2,X,T1,T2) :- X2 .=. X+4/3*(T2-T1).")
    c = prog.rules[0].body[0]
    assert isinstance(c, Constraint) and c.numeric and c.op == "="


def test_nonlinear_product_rejected():
    with pytest.raises(NonLinearError):
        parse_program("p(X,Y) :- X*Y .>. 1.")


def test_decimal_literal_is_exact():
    q = parse_query("?- p(4.5).")
    assert q[0].atom.args[0] == Rat(Fraction(9, 2))


@given(st.integers(0, 10**6), st.integers(1, 6))
def test_decimals_parse_to_their_rational_image(whole, places):
    frac = 10**places - 1
    text = f"{whole}.{frac:0{places}d}"
    q = parse_query(f"?- p({text}).")
    value = q[0].atom.args[0].value
    assert value * 10**places == whole * 10**places + frac


def test_query_forms():
    assert parse_query("?- p(A).") == [Lit(Compound("p", (Var("A"),)))]
    q = parse_query("?- holdsAt(level(H),15/2).")
    assert q[0].atom.args[1] == Rat(Fraction(15, 2))
    q = parse_query("?- not member(B, A).")
    assert q[0].negated and term_str(q[0].atom) == "member(B,A)"


def test_empty_query_rejected():
    with pytest.raises(ScaspSyntaxError):
        parse_query("?- .")


def test_not_classical_negation_is_representable():
    q = parse_query("?- not -holdsAt(on,1).")
    assert q[0].negated and q[0].classical


def test_list_sugar_round_trips():
    prog = parse_program("l([a,b|T]).")
    atom = prog.rules[0].head.atom
    assert atom.args[0] == mk_list([Const("a"), Const("b")], Var("T"))
    assert term_str(atom) == "l([a,b|T])"


def test_anonymous_variables_are_fresh():
    r = parse_program("p(_, _).").rules[0]
    a, b = r.head.atom.args
    assert a != b


def test_directives():
    prog = parse_program("#abducible happens(tapOn,5).\n#show happens/2, -holdsAt/2.\np.")
    assert [term_str(a) for a in prog.abducibles] == ["happens(tapOn,5)"]
    assert prog.shows == [("happens", 2, False), ("-holdsAt", 2, False)]


def test_reserved_prefix_rejected():
    with pytest.raises(ScaspSyntaxError):
        parse_program("o_x :- p.")


def test_normalize_moves_head_bindings_into_body():
    r = normalize(parse_program("q(X,a) :- X .>. 5.")).rules[0]
    x, v = r.head.atom.args
    assert isinstance(x, Var) and isinstance(v, Var) and x != v
    assert r.body[0] == Constraint("=", v, Const("a"), False)
    assert r.body[1].op == ">"


def test_normalize_leaves_normal_rules_alone():
    before = parse_program("p(X) :- q(X).").rules[0]
    after = normalize(parse_program("p(X) :- q(X).")).rules[0]
    assert rules_variant(before, after)


def test_normalize_fact():
    r = normalize(parse_program("happens(turn_on, 2).")).rules[0]
    e, t = r.head.atom.args
    assert r.body == (Constraint("=", e, Const("turn_on"), False), Constraint("=", t, Rat(Fraction(2)), False))


def test_normalize_repeated_head_variable():
    r = normalize(parse_program("eq(X,X).")).rules[0]
    a, b = r.head.atom.args
    assert a != b and len(r.body) == 1


def test_normalize_standardizes_apart():
    prog = normalize(parse_program("p(X) :- q(X). r(X) :- q(X)."))
    v1 = set(prog.rules[0].variables())
    v2 = set(prog.rules[1].variables())
    assert not v1 & v2


def test_abducible_expansion():
    prog = expand_abducibles(normalize(parse_program("#abducible a.")))
    heads = sorted(term_str(r.head.atom) for r in prog.rules)
    assert heads == ["a", "o__abd_a"]
    assert all(r.body[-1].negated for r in prog.rules)


def test_abducible_without_declarations_is_identity():
    prog = normalize(parse_program("p :- q."))
    assert expand_abducibles(prog) is prog


def test_abducible_clash_with_rules():
    with pytest.raises(AbducibleError):
        expand_abducibles(normalize(parse_program("h(t,X). #abducible h(t,5).")))


def test_abducible_distinct_from_ground_rule_is_fine():
    expand_abducibles(normalize(parse_program("h(o,X). #abducible h(t,5).")))


def test_include_resolves_relative_and_bundled(tmp_path):
    (tmp_path / "base.pl").write_text("b.\n")
    (tmp_path / "main.pl").write_text("#include base.\n#include bec_theory.\na :- b.\n")
    prog = load_program(tmp_path / "main.pl")
    heads = {r.head.key[0] for r in prog.rules if r.head}
    assert {"a", "b", "holdsAt", "-holdsAt", "stoppedIn"} <= heads


def test_include_cycle_is_an_error(tmp_path):
    (tmp_path / "a.pl").write_text("#include b.\n")
    (tmp_path / "b.pl").write_text("#include a.\n")
    with pytest.raises(ScaspSyntaxError):
        load_program(tmp_path / "a.pl")


def test_load_text_resolves_against_base(tmp_path):
    (tmp_path / "f.pl").write_text("f.\n")
    prog = load_text("#include f.\ng :- f.", base_dir=tmp_path)
    assert len(prog.rules) == 2


NUM_OPS = [".<.", ".>=.", ".=.", ".\\=."]
HERBRAND_NEQ = "\\="
names = st.sampled_from(["p", "q", "r", "-p", "s"])
consts = st.sampled_from(["a", "b", "1", "3/2", "X", "Y", "[a,b]", "f(X)"])


@st.composite
def rules(draw):
    head = draw(names)
    args = draw(st.lists(consts, min_size=0, max_size=2))
    h = head + (f"({','.join(args)})" if args else "")
    body = []
    for _ in range(draw(st.integers(0, 3))):
        kind = draw(st.integers(0, 2))
        if kind == 0:
            body.append(draw(st.sampled_from(["", "not "])) + draw(names))
        elif kind == 1:
            op = draw(st.sampled_from(NUM_OPS))
            body.append(f"X {op} {draw(st.sampled_from(['1', 'Y+2', '1/3*Y']))}")
        else:
            op = draw(st.sampled_from(["=", HERBRAND_NEQ]))
            body.append(f"X {op} {draw(consts)}")
    return h + (" :- " + ", ".join(body) if body else "") + "."


@given(st.lists(rules(), min_size=1, max_size=4))
def test_print_parse_fixpoint(texts):
    prog = parse_program("\n".join(texts))
    again = parse_program(str(prog))
    assert len(again.rules) == len(prog.rules)
    for a, b in zip(prog.rules, again.rules):
        assert rules_variant(a, b), (str(a), str(b))
