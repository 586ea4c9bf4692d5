"""Term representation shared by the parser, the constraint store and the engine."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Union

NIL = "[]"
CONS = "."


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Rat:
    value: Fraction

    def __str__(self) -> str:
        return format_rational(self.value)


@dataclass(frozen=True, slots=True)
class Const:
    name: str

    def __str__(self) -> str:
        return format_atom(self.name)


@dataclass(frozen=True, slots=True)
class Compound:
    functor: str
    args: tuple

    def __post_init__(self):
        if not self.args:
            raise ValueError("compound terms need at least one argument; use Const")

    def __str__(self) -> str:
        return term_str(self)


Term = Union[Var, Rat, Const, Compound]

_fresh = itertools.count()


def fresh_var(hint: str = "G") -> Var:
    """A runtime variable; the ``_`` prefix keeps it out of the user namespace."""
    return Var(f"_{hint}{next(_fresh)}")


def var_serial(v: Var) -> int:
    """Creation order of runtime variables (source variables sort first)."""
    digits = ""
    for ch in reversed(v.name):
        if not ch.isdigit():
            break
        digits = ch + digits
    if v.name.startswith("_") and digits:
        return int(digits)
    return -1


def current_serial() -> int:
    """Serial that the next fresh variable will receive or exceed."""
    v = fresh_var()
    return var_serial(v)


def rat(x) -> Rat:
    return Rat(Fraction(x))


def mk_list(items, tail: Term | None = None) -> Term:
    out = tail if tail is not None else Const(NIL)
    for item in reversed(list(items)):
        out = Compound(CONS, (item, out))
    return out


def pred_key(t: Term) -> tuple[str, int]:
    if isinstance(t, Const):
        return (t.name, 0)
    if isinstance(t, Compound):
        return (t.functor, len(t.args))
    raise TypeError(f"not a callable term: {t}")


def term_vars(t: Term, acc: dict | None = None) -> dict:
    """Ordered set (dict) of variables in ``t``, in first-occurrence order."""
    if acc is None:
        acc = {}
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, Var):
            acc.setdefault(x, None)
        elif isinstance(x, Compound):
            stack.extend(reversed(x.args))
    return acc


def is_ground(t: Term) -> bool:
    if isinstance(t, Var):
        return False
    if isinstance(t, Compound):
        return all(is_ground(a) for a in t.args)
    return True


def substitute(t: Term, mapping: Mapping[Var, Term]) -> Term:
    if isinstance(t, Var):
        return mapping.get(t, t)
    if isinstance(t, Compound):
        return Compound(t.functor, tuple(substitute(a, mapping) for a in t.args))
    return t


def iter_subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, Compound):
        for a in t.args:
            yield from iter_subterms(a)


def is_variant(a: Term, b: Term) -> bool:
    """Equal up to a bijective renaming of variables."""
    fwd: dict = {}
    bwd: dict = {}
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        if isinstance(x, Var) or isinstance(y, Var):
            if not (isinstance(x, Var) and isinstance(y, Var)):
                return False
            if fwd.setdefault(x, y) != y or bwd.setdefault(y, x) != x:
                return False
        elif isinstance(x, Compound):
            if not isinstance(y, Compound) or x.functor != y.functor or len(x.args) != len(y.args):
                return False
            stack.extend(zip(x.args, y.args))
        elif x != y:
            return False
    return True


# ---------------------------------------------------------------- printing

def format_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_decimal(q: Fraction, digits: int = 3) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    text = f"{float(q):.{digits}f}".rstrip("0")
    return text + "..." if Fraction(text) != q else text


def format_atom(name: str) -> str:
    if name == NIL:
        return NIL
    if name and (name[0].islower() or name.startswith("-")) and all(c.isalnum() or c == "_" for c in name.lstrip("-")):
        return name
    if name in ("+", "-", "*", "/"):
        return name
    escaped = name.replace("\\", "\\\\").replace("'", "\\'")
    return f"'{escaped}'"


_INFIX = {"+": 500, "-": 500, "*": 400, "/": 400}


def term_str(t: Term, fmt_rat=format_rational, names: Mapping[Var, str] | None = None) -> str:
    def go(x: Term, prec: int = 1200) -> str:
        if isinstance(x, Var):
            return names.get(x, x.name) if names else x.name
        if isinstance(x, Rat):
            s = fmt_rat(x.value)
            return f"({s})" if prec < 200 and x.value < 0 else s
        if isinstance(x, Const):
            return format_atom(x.name)
        if x.functor == CONS and len(x.args) == 2:
            items = []
            cur: Term = x
            while isinstance(cur, Compound) and cur.functor == CONS and len(cur.args) == 2:
                items.append(go(cur.args[0], 999))
                cur = cur.args[1]
            inner = ",".join(items)
            if isinstance(cur, Const) and cur.name == NIL:
                return f"[{inner}]"
            return f"[{inner}|{go(cur, 999)}]"
        if x.functor in _INFIX and len(x.args) == 2:
            p = _INFIX[x.functor]
            s = f"{go(x.args[0], p)}{x.functor}{go(x.args[1], p - 1)}"
            return f"({s})" if p > prec else s
        if x.functor == "-" and len(x.args) == 1:
            return f"-{go(x.args[0], 200)}"
        return f"{format_atom(x.functor)}({','.join(go(a, 999) for a in x.args)})"

    return go(t)
