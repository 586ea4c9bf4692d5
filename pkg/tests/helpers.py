"""Shared helpers: run queries and canonicalize rendered literals."""

from __future__ import annotations

import re
import time

from ecscasp import compile_program, ec, load_program, parse_program, parse_query, solve_all
from ecscasp.render import answer_records

_compiled: dict = {}


def compiled(source: str):
    """Compile program text, or a bundled example when ``source`` names one."""
    if source not in _compiled:
        if source in ec.EXAMPLES:
            prog = load_program(ec.example_path(source))
        else:
            prog = parse_program(source)
        _compiled[source] = compile_program(prog)
    return _compiled[source]


def run(source: str, query: str, **kw):
    cp = compiled(source)
    return solve_all(cp, parse_query(query), **kw)


def timed(source: str, query: str, **kw):
    t = time.perf_counter()
    out = run(source, query, **kw)
    return out, time.perf_counter() - t


def records(answer, shows=None):
    return answer_records(answer, shows)


_VAR = re.compile(r"\b[A-Z][A-Za-z0-9_]*\b")


def canon_literal(rec: dict) -> tuple:
    """Literal with variables renamed by first occurrence and its constraints
    as a set, so listings can be compared regardless of variable letters."""
    names: dict = {}

    def rename(text: str) -> str:
        return _VAR.sub(lambda m: names.setdefault(m.group(0), f"V{len(names)}"), text)

    atom = ("not " if rec["negated"] else "") + rename(rec["atom"])
    cons = frozenset(rename(c).replace(" ", "") for cs in rec["constraints"].values() for c in cs)
    return atom.replace(" ", ""), cons


def canon_model(rec: dict) -> frozenset:
    return frozenset(canon_literal(m) for m in rec["model"])


def lit(atom: str, *constraints: str, negated: bool = False) -> tuple:
    """Expected literal in canonical form; constraints use the printed operators."""
    return canon_literal(
        {
            "negated": negated,
            "atom": atom,
            "constraints": {"_": list(constraints)} if constraints else {},
        }
    )
