import json

import pytest

from ecscasp import cli
from ecscasp.render import text_from_records

LEVEL_QUERY = "?- holdsAt(level(H),15/2)."


def call(capsys, *argv):
    code = cli.main(list(argv))
    got = capsys.readouterr()
    return code, got.out, got.err


@pytest.fixture
def peano(tmp_path):
    path = tmp_path / "peano.pl"
    path.write_text("n(0).\nn(s(X)) :- n(X).\n")
    return path


def test_answer_found(capsys):
    code, out, _ = call(capsys, "--example", "watertap", "-q", LEVEL_QUERY)
    assert code == cli.EXIT_OK
    assert "H = 10/3" in out
    assert "holdsAt(level(10/3),15/2)" in out


def test_no_models_exit(capsys):
    code, out, _ = call(capsys, "--example", "light-badred", "-q", "?- holdsAt(red,T).")
    assert code == cli.EXIT_NO_MODELS
    assert out.strip() == "no models"


def test_missing_file_is_an_error(capsys, tmp_path):
    code, _, err = call(capsys, str(tmp_path / "absent.pl"), "-q", "?- p.")
    assert code == cli.EXIT_ERROR
    assert "absent.pl" in err


def test_syntax_error_reports_position(capsys, tmp_path):
    bad = tmp_path / "bad.pl"
    bad.write_text("p :- q(.\n")
    code, _, err = call(capsys, str(bad), "-q", "?- p.")
    assert code == cli.EXIT_ERROR
    assert "1:" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["--bogus"],
        ["-q", "?- p."],
        ["--example", "light"],
        ["--example", "nosuch", "-q", "?- p."],
        ["--example", "light", "-q", "?- p.", "-s", "-1"],
        ["--example", "light", "-q", "?- p.", "--depth", "0"],
    ],
)
def test_usage_errors(capsys, argv):
    code, _, _ = call(capsys, *argv)
    assert code == cli.EXIT_ERROR


def test_depth_bound_gives_unknown(capsys, peano):
    code, out, err = call(capsys, str(peano), "-q", "?- n(s(s(s(s(0))))).", "--depth", "3")
    assert code == cli.EXIT_UNKNOWN
    assert "incomplete" in err
    assert "no models" not in out


def test_decimal_output_flags_approximation(capsys):
    code, out, _ = call(capsys, "--example", "watertap", "-q", LEVEL_QUERY, "-r")
    assert code == cli.EXIT_OK
    assert "H = 3.333..." in out
    assert "approximate" in out


def test_exact_decimals_are_not_flagged(capsys):
    code, out, _ = call(capsys, "--example", "watertap", "-q", "?- holdsAt(level(11),T).", "-r")
    assert code == cli.EXIT_OK
    assert "T = 13.25" in out
    assert "approximate" not in out


def test_json_lines_match_text(capsys):
    argv = ["--example", "light", "-q", "?- holdsAt(red,T)."]
    _, text, _ = call(capsys, *argv)
    _, js, _ = call(capsys, *argv, "--json")
    recs = [json.loads(line) for line in js.splitlines()]
    assert len(recs) == 2
    assert "\n\n".join(text_from_records(r) for r in recs) == text.rstrip("\n")
    for r in recs:
        assert set(r) >= {"model", "bindings", "constraints", "justification"}


def test_answer_limit(capsys):
    _, js, _ = call(capsys, "--example", "light", "-q", "?- holdsAt(red,T).", "--json", "-s", "1")
    assert len(js.splitlines()) == 1


def test_show_filter_and_show_all(capsys):
    argv = ["--example", "watertap", "-q", LEVEL_QUERY]
    _, filtered, _ = call(capsys, *argv)
    _, everything, _ = call(capsys, *argv, "--show-all")
    assert "max_level" not in filtered
    assert "max_level(10)" in everything
    assert "trajectory(" in everything


def test_dump_dual_without_query(capsys, peano):
    code, out, _ = call(capsys, str(peano), "--dump-dual")
    assert code == cli.EXIT_OK
    assert "% dual" in out
    assert "not n(" in out


def test_justify_and_store(capsys):
    code, out, _ = call(capsys, "--example", "light", "-q", "?- holdsAt(on,3).", "--justify", "--dump-store")
    assert code == cli.EXIT_OK
    assert "happens(turn_on,2)" in out
    assert "% store:" in out


def test_files_and_examples_combine(capsys, tmp_path):
    extra = tmp_path / "extra.pl"
    extra.write_text("bright(T) :- holdsAt(on,T).\n#show bright/1.\n")
    code, out, _ = call(capsys, "--example", "light", str(extra), "-q", "?- bright(3).")
    assert code == cli.EXIT_OK
    assert "bright(3)" in out
