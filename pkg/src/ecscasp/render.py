"""Text and JSON rendering of answers in ``{ lit(V | {C}), ... }`` notation."""

from __future__ import annotations

import json
from typing import Optional

from .terms import Term, Var, format_decimal, format_rational, term_str, term_vars

NUMERIC_OPS = {"<": "#<", ">": "#>", "=<": "#=<", ">=": "#>=", "=": "#=", "\\=": "#\\="}
HERBRAND_OPS = {"=": "=", "\\=": "\\="}


class VarNamer:
    """Stable printable names: query variables keep theirs, others get letters."""

    def __init__(self, reserved=()):
        self.names: dict = {}
        self.taken = {v.name for v in reserved}
        for v in reserved:
            self.names[v] = v.name
        self._next = 0

    def __call__(self, v: Var) -> str:
        name = self.names.get(v)
        if name is None:
            while True:
                i = self._next
                self._next += 1
                letter = chr(ord("A") + i % 26)
                name = letter if i < 26 else f"{letter}{i // 26}"
                if name not in self.taken:
                    break
            self.taken.add(name)
            self.names[v] = name
        return name

    def mapping(self, t: Term) -> dict:
        return {v: self(v) for v in term_vars(t)}


def shown(lit, shows) -> bool:
    if not shows:
        return True
    name, arity = lit.key
    for sname, sarity, neg_only in shows:
        if sname == name and sarity == arity and (lit.negated or not neg_only):
            return True
    return False


def constraint_text(c, namer: VarNamer, fmt_rat=format_rational) -> str:
    op, lhs, rhs, numeric = c
    names = {**namer.mapping(lhs), **namer.mapping(rhs)}
    sym = NUMERIC_OPS[op] if numeric else HERBRAND_OPS[op]
    return f"{term_str(lhs, fmt_rat, names)} {sym} {term_str(rhs, fmt_rat, names)}"


def literal_text(lit, store, namer: VarNamer, fmt_rat=format_rational) -> str:
    decorated = {}
    for v in term_vars(lit.atom):
        name = namer(v)
        cs = store.project([v])
        if cs:
            inner = ",".join(constraint_text(c, namer, fmt_rat) for c in cs)
            decorated[v] = f"{name} | {{{inner}}}"
        else:
            decorated[v] = name
    text = term_str(lit.atom, fmt_rat, decorated)
    return f"not {text}" if lit.negated else text


def binding_texts(answer, namer: VarNamer, fmt_rat=format_rational) -> list[str]:
    out = []
    for v, t in answer.bindings().items():
        out.append(f"{namer(v)} = {term_str(t, fmt_rat, namer.mapping(t))}")
    for c in answer.query_constraints():
        out.append(constraint_text(c, namer, fmt_rat))
    return out


def answer_records(answer, shows=None, decimals: bool = False) -> dict:
    fmt = format_decimal if decimals else format_rational
    namer = VarNamer(answer.query_vars)
    model = []
    for lit in answer.model:
        if not shown(lit, shows):
            continue
        constraints = {}
        for v in term_vars(lit.atom):
            cs = answer.store.project([v])
            if cs:
                constraints[namer(v)] = [constraint_text(c, namer, fmt) for c in cs]
        model.append(
            {
                "text": literal_text(lit, answer.store, namer, fmt),
                "negated": lit.negated,
                "predicate": f"{lit.key[0]}/{lit.key[1]}",
                "atom": term_str(lit.atom, fmt, namer.mapping(lit.atom)),
                "constraints": constraints,
            }
        )
    bindings = {}
    for v, t in answer.bindings().items():
        bindings[namer(v)] = term_str(t, fmt, namer.mapping(t))
    constraints = [constraint_text(c, namer, fmt) for c in answer.query_constraints()]
    return {
        "model": model,
        "bindings": bindings,
        "constraints": constraints,
        "justification": [_node_record(n, answer.store, namer, fmt) for n in answer.justification],
        "approximate": decimals and any("..." in m["text"] for m in model)
        or decimals and any("..." in b for b in list(bindings.values()) + constraints),
    }


def _node_record(node, store, namer, fmt) -> dict:
    from .syntax import Constraint, Lit

    g = node.goal
    if isinstance(g, Lit):
        atom = store.resolve(g.atom)
        label = ("not " if g.negated else "") + term_str(atom, fmt, namer.mapping(atom))
    elif isinstance(g, Constraint):
        lhs, rhs = store.resolve(g.lhs), store.resolve(g.rhs)
        label = constraint_text((g.op, lhs, rhs, g.numeric), namer, fmt)
    else:
        label = str(g)
    rec = {"goal": label, "children": [_node_record(c, store, namer, fmt) for c in node.children]}
    if node.how != "rule":
        rec["how"] = node.how
    return rec


def text_from_records(rec: dict) -> str:
    model = "{ " + ", ".join(m["text"] for m in rec["model"]) + " }" if rec["model"] else "{ }"
    binds = [f"{k} = {v}" for k, v in rec["bindings"].items()] + list(rec["constraints"])
    lines = [model]
    if binds:
        lines.append("  " + ", ".join(binds))
    if rec.get("approximate"):
        lines.append("  % decimal values marked ... are approximate")
    return "\n".join(lines)


def answer_text(answer, shows=None, decimals: bool = False) -> str:
    return text_from_records(answer_records(answer, shows, decimals))


def answer_json(answer, shows=None, decimals: bool = False) -> str:
    return json.dumps(answer_records(answer, shows, decimals))


def justification_text(answer, decimals: bool = False) -> str:
    fmt = format_decimal if decimals else format_rational
    namer = VarNamer(answer.query_vars)
    lines: list[str] = []

    def go(rec, depth):
        suffix = f"   [{rec['how']}]" if rec.get("how") and rec["how"] != "constraint" else ""
        lines.append("  " * depth + rec["goal"] + suffix)
        for c in rec["children"]:
            go(c, depth + 1)

    for n in answer.justification:
        go(_node_record(n, answer.store, namer, fmt), 0)
    return "\n".join(lines)


def record_from_json(text: str) -> Optional[dict]:
    return json.loads(text)
