import pytest

from ecscasp import Engine, compile_program, parse_program, parse_query, solve, solve_all
from ecscasp.engine import Node
from ecscasp.render import answer_text
from ecscasp.syntax import Lit
from ecscasp.terms import Const, Rat, term_str

from helpers import canon_model, lit, records, run

EXAMPLE_1 = """
p(X) :- q(X, Z), not r(X).
p(Z) :- not q(X, Z), r(X).
q(X, a) :- X .>. 5.
r(X) :- X .<. 1.
"""


def texts(answers):
    return [answer_text(a) for a in answers]


def test_odd_loop_fails():
    assert run("p :- q. q :- not r. r :- p.", "?- p.") == []


def test_positive_loop_fails():
    assert run("p :- p.", "?- p.") == []


def test_even_loop_models():
    prog = "p :- not q. q :- r. r :- not p."
    assert texts(run(prog, "?- p.")) == ["{ p, not q, not r }"]
    assert texts(run(prog, "?- q.")) == ["{ q, r, not p }"]


def test_unrelated_odd_loop_kills_every_query():
    assert run("q. r :- not r.", "?- q.") == []


def test_fact_query_model_is_the_fact():
    answers = run("f(a).", "?- f(a).")
    assert texts(answers) == ["{ f(a) }"]
    assert records(answers[0])["model"][0]["constraints"] == {}


def test_example_one_third_answer_binds_constant():
    third = run(EXAMPLE_1, "?- p(A).")[2]
    assert third.value("A") == Const("a")
    assert records(third)["bindings"] == {"A": "a"}


def test_forall_restricts_outer_variable():
    answers = run("q(X,a) :- X .>. 5.", "?- forall(B, not q(A,B)).")
    assert [records(a)["constraints"] for a in answers] == [["A #=< 5"]]


def test_forall_trivially_true():
    assert len(run("t(X).", "?- forall(B, t(B)).")) == 1


def test_forall_fails_when_a_value_fails():
    assert run("t(X) :- X .>. 0.", "?- forall(B, t(B)).") == []


def test_forall_region_cap_reports_diagnostic():
    cp = compile_program(parse_program("t(X) :- X .\\=. 1. t(1)."))
    eng = Engine(cp, forall_cap=1)
    answers = list(solve(cp, parse_query("?- forall(B, t(B))."), engine=eng))
    assert answers == []
    assert any("limit" in d for d in eng.stats.diagnostics)


def test_depth_bound_marks_truncation():
    cp = compile_program(parse_program("n(0). n(s(X)) :- n(X)."))
    eng = Engine(cp, depth_limit=3)
    answers = list(solve(cp, parse_query("?- n(s(s(s(s(0)))))."), engine=eng))
    assert answers == [] and eng.stats.truncated
    deep = parse_query("?- n(s(s(s(s(0))))).")
    assert len(list(solve(cp, deep))) == 1


def test_constructive_negation_over_lists():
    answers = run(
        "member(X, [X|Xs]). member(X, [_|Xs]) :- member(X, Xs).",
        "?- not member(B, [1,2]).",
    )
    assert records(answers[0])["constraints"] == ["B \\= 1", "B \\= 2"]


def test_classical_negation_and_complement():
    prog = "-p :- not p. p :- not -p."
    assert len(run(prog, "?- p.")) == 1
    assert len(run(prog, "?- -p.")) == 1
    assert run(prog, "?- p, -p.") == []


def test_determinism():
    a = texts(run(EXAMPLE_1, "?- p(A)."))
    b = texts(solve_all(compile_program(parse_program(EXAMPLE_1)), parse_query("?- p(A).")))
    assert a == b


def test_lazy_stream():
    stream = solve(compile_program(parse_program("n(0). n(s(X)) :- n(X).")), parse_query("?- n(X)."))
    first = [next(stream) for _ in range(3)]
    assert [term_str(a.value("X")) for a in first] == ["0", "s(0)", "s(s(0))"]


def test_no_nmr_option_skips_checks():
    cp = compile_program(parse_program("q. r :- not r."))
    assert list(solve(cp, parse_query("?- q."), nmr=False))


def _walk(nodes):
    for n in nodes:
        yield n
        yield from _walk(n.children)


@pytest.mark.parametrize(
    "source,query",
    [
        (EXAMPLE_1, "?- p(A)."),
        ("p :- not q. q :- r. r :- not p.", "?- p."),
        ("light", "?- holdsAt(on,3)."),
        ("watertap", "?- holdsAt(level(12),14)."),
    ],
)
def test_support_every_model_literal_is_justified(source, query):
    for ans in run(source, query):
        justified = {(n.goal.negated, term_str(ans.store.resolve(n.goal.atom))) for n in _walk(ans.justification) if isinstance(n.goal, Lit)}
        for m in ans.model:
            assert (m.negated, term_str(m.atom)) in justified
        for n in _walk(ans.justification):
            if isinstance(n.goal, Lit) and not n.goal.negated and n.how == "rule":
                # a positive literal proved by a rule has its clause body as children
                assert all(isinstance(c, Node) for c in n.children)


def test_coinductive_assumption_recorded_in_model():
    answers = run("p :- not q. q :- not p.", "?- p.")
    assert canon_model(records(answers[0])) == frozenset({lit("p"), lit("q", negated=True)})


def test_numeric_answer_is_exact_rational():
    answers = run("lvl(X, T) :- X .=. 4/3*(T-5).", "?- lvl(X, 15/2).")
    assert answers[0].value("X") == Rat(__import__("fractions").Fraction(10, 3))
