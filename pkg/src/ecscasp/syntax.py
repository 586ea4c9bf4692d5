"""Surface grammar: tokenizer, parser, normalization and abducible expansion.

Rules end with ``.``; ``:-`` separates head and body; ``not`` prefixes default
negation and ``-`` classical negation.  Linear constraints use the
``.<. .>. .=<. .>=. .=. .\\=.`` family, Herbrand (dis)equality uses ``=`` and
``\\=``.  Directives: ``#include``, ``#abducible``, ``#show``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional, Union

from .terms import (
    CONS,
    NIL,
    Compound,
    Const,
    Rat,
    Term,
    Var,
    fresh_var,
    is_variant,
    mk_list,
    pred_key,
    substitute,
    term_str,
    term_vars,
)

HIDDEN_PREFIX = "o_"
# hidden from printed models, but a genuine literal for loop detection
AUX_PREFIX = "o__"

NUMERIC_OPS = ("<", ">", "=<", ">=", "=", "\\=")
_SURFACE_OPS = {
    ".<.": "<",
    ".>.": ">",
    ".=<.": "=<",
    ".>=.": ">=",
    ".=.": "=",
    ".\\=.": "\\=",
}


class ScaspSyntaxError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0, source: str | None = None):
        where = f"{source + ':' if source else ''}{line}:{col}: " if line else ""
        super().__init__(f"{where}{message}")
        self.line = line
        self.col = col


class NonLinearError(ScaspSyntaxError):
    """A numeric constraint multiplies or divides by a non-constant expression."""


# ---------------------------------------------------------------- AST


@dataclass(frozen=True, slots=True)
class Lit:
    """A (possibly default-negated) call.  Classical negation lives in the
    predicate name: ``-p(X)`` is the atom with functor ``-p``."""

    atom: Term
    negated: bool = False

    @property
    def key(self) -> tuple[str, int]:
        return pred_key(self.atom)

    @property
    def classical(self) -> bool:
        return self.key[0].startswith("-")

    def __str__(self) -> str:
        return ("not " if self.negated else "") + term_str(self.atom)


@dataclass(frozen=True, slots=True)
class Constraint:
    """``lhs op rhs``.  ``numeric`` selects CLP(Q) semantics, otherwise Herbrand."""

    op: str
    lhs: Term
    rhs: Term
    numeric: bool = True

    def __str__(self) -> str:
        if self.numeric:
            surface = {v: k for k, v in _SURFACE_OPS.items()}[self.op]
        else:
            surface = " = " if self.op == "=" else " \\= "
        return f"{term_str(self.lhs)}{surface}{term_str(self.rhs)}"


@dataclass(frozen=True, slots=True)
class Forall:
    var: Var
    goal: "Goal"

    def __str__(self) -> str:
        return f"forall({self.var},{self.goal})"


Goal = Union[Lit, Constraint, Forall]


@dataclass(frozen=True, slots=True)
class Rule:
    head: Optional[Lit]
    body: tuple
    line: int = 0

    @property
    def is_denial(self) -> bool:
        return self.head is None

    def variables(self) -> dict:
        acc: dict = {}
        if self.head is not None:
            term_vars(self.head.atom, acc)
        for g in self.body:
            goal_vars(g, acc)
        return acc

    def __str__(self) -> str:
        body = ", ".join(str(g) for g in self.body)
        if self.head is None:
            return f":- {body}."
        if not self.body:
            return f"{self.head}."
        return f"{self.head} :- {body}."


@dataclass
class Program:
    rules: list = field(default_factory=list)
    includes: list = field(default_factory=list)
    abducibles: list = field(default_factory=list)
    shows: list = field(default_factory=list)  # (name, arity, negated)

    def __str__(self) -> str:
        return "\n".join(str(r) for r in self.rules)

    def extend(self, other: "Program") -> None:
        self.rules.extend(other.rules)
        self.abducibles.extend(other.abducibles)
        self.shows.extend(s for s in other.shows if s not in self.shows)


def goal_vars(g: Goal, acc: dict | None = None) -> dict:
    if acc is None:
        acc = {}
    if isinstance(g, Lit):
        term_vars(g.atom, acc)
    elif isinstance(g, Constraint):
        term_vars(g.lhs, acc)
        term_vars(g.rhs, acc)
    else:
        acc.setdefault(g.var, None)
        goal_vars(g.goal, acc)
    return acc


def rename_goal(g: Goal, mapping) -> Goal:
    if isinstance(g, Lit):
        return Lit(substitute(g.atom, mapping), g.negated)
    if isinstance(g, Constraint):
        return Constraint(g.op, substitute(g.lhs, mapping), substitute(g.rhs, mapping), g.numeric)
    return Forall(mapping.get(g.var, g.var), rename_goal(g.goal, mapping))


# ---------------------------------------------------------------- lexer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+|%[^\n]*)
  | (?P<cop>\.=<\.|\.>=\.|\.\\=\.|\.<\.|\.>\.|\.=\.)
  | (?P<num>\d+(?:\.\d+)?)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<atom>[a-z][A-Za-z0-9_]*)
  | (?P<qatom>'(?:[^'\\]|\\.)*')
  | (?P<dir>\#[a-z]+)
  | (?P<punct>:-|\?-|\\=|=<|>=|[=<>()\[\]|,+\-*/.])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True, slots=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str, source: str | None = None) -> list[Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ScaspSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1, source)
        kind = m.lastgroup
        chunk = m.group()
        if kind != "ws":
            if kind == "qatom":
                kind = "atom"
                chunk = re.sub(r"\\(.)", r"\1", chunk[1:-1])
            tokens.append(Token(kind, chunk, line, pos - line_start + 1))
        nl = chunk.count("\n") if kind == "ws" else 0
        if nl:
            line += nl
            line_start = pos + m.group().rfind("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# ---------------------------------------------------------------- parser


class _Parser:
    def __init__(self, text: str, source: str | None = None):
        self.toks = tokenize(text, source)
        self.i = 0
        self.source = source
        self.clause_vars: dict[str, Var] = {}

    # helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: Token | None = None, cls=ScaspSyntaxError):
        tok = tok or self.tok
        raise cls(msg, tok.line, tok.col, self.source)

    def accept(self, text: str) -> bool:
        if self.tok.kind in ("punct", "cop") and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            found = self.tok.text or "end of input"
            self.error(f"expected {text!r}, found {found!r}")

    # program level
    def program(self) -> Program:
        prog = Program()
        while self.tok.kind != "eof":
            self.clause_vars = {}
            if self.tok.kind == "dir":
                self.directive(prog)
            elif self.tok.kind == "punct" and self.tok.text == "?-":
                self.error("queries are not allowed inside programs")
            else:
                prog.rules.append(self.clause())
        return prog

    def directive(self, prog: Program) -> None:
        tok = self.tok
        self.i += 1
        if tok.text == "#include":
            t = self.tok
            if t.kind != "atom":
                self.error("#include expects a file name or library atom")
            self.i += 1
            prog.includes.append(t.text)
        elif tok.text == "#abducible":
            lit = self.literal()
            if lit.negated:
                self.error("#abducible expects a positive atom", tok)
            prog.abducibles.append(lit.atom)
        elif tok.text == "#show":
            while True:
                negated = False
                if self.tok.kind == "atom" and self.tok.text == "not":
                    negated = True
                    self.i += 1
                classical = self.accept("-")
                if self.tok.kind != "atom":
                    self.error("#show expects name/arity")
                name = ("-" if classical else "") + self.tok.text
                self.i += 1
                self.expect("/")
                if self.tok.kind != "num" or "." in self.tok.text:
                    self.error("#show expects an integer arity")
                arity = int(self.tok.text)
                self.i += 1
                prog.shows.append((name, arity, negated))
                if not self.accept(","):
                    break
        else:
            self.error(f"unknown directive {tok.text}", tok)
        self.expect(".")

    def clause(self) -> Rule:
        line = self.tok.line
        if self.accept(":-"):
            body = self.body()
            self.expect(".")
            return Rule(None, tuple(body), line)
        start = self.tok
        head = self.literal()
        if head.negated:
            self.error("rule heads cannot be default-negated", start)
        body: list = []
        if self.accept(":-"):
            body = self.body()
        self.expect(".")
        return Rule(head, tuple(body), line)

    def query(self) -> list:
        self.accept("?-")
        if self.tok.kind == "eof" or (self.tok.kind == "punct" and self.tok.text == "."):
            self.error("empty query")
        goals = self.body()
        self.expect(".")
        if self.tok.kind != "eof":
            self.error("trailing input after query")
        return goals

    def body(self) -> list:
        goals = [self.goal()]
        while self.accept(","):
            goals.append(self.goal())
        return goals

    def goal(self) -> Goal:
        if self.tok.kind == "atom" and self.tok.text == "not" and not (
            self.peek().kind == "punct" and self.peek().text in ("(", ",", ".")
        ):
            self.i += 1
            lit = self.literal()
            return Lit(lit.atom, True)
        if self.tok.kind == "atom" and self.tok.text == "forall" and self.peek().text == "(":
            self.i += 2
            if self.tok.kind != "var":
                self.error("forall expects a variable")
            v = self.variable()
            self.expect(",")
            inner = self.goal()
            self.expect(")")
            return Forall(v, inner)
        start = self.tok
        left = self.expr()
        t = self.tok
        if t.kind == "cop":
            self.i += 1
            right = self.expr()
            self._check_linear(left, start)
            self._check_linear(right, start)
            return Constraint(_SURFACE_OPS[t.text], left, right, True)
        if t.kind == "punct" and t.text in ("=", "\\="):
            self.i += 1
            right = self.expr()
            return Constraint(t.text, left, right, False)
        return self._as_literal(left, start)

    def literal(self) -> Lit:
        start = self.tok
        return self._as_literal(self.expr(), start)

    def _as_literal(self, t: Term, start: Token) -> Lit:
        if isinstance(t, Compound) and t.functor == "-" and len(t.args) == 1:
            inner = t.args[0]
            if isinstance(inner, Const) and inner.name != NIL:
                return Lit(Const("-" + inner.name))
            if isinstance(inner, Compound) and inner.functor not in ("-", "+", "*", "/", CONS):
                return Lit(Compound("-" + inner.functor, inner.args))
        if isinstance(t, Const) and t.name != NIL:
            return Lit(t)
        if isinstance(t, Compound) and t.functor not in ("+", "-", "*", "/", CONS):
            return Lit(t)
        self.error(f"expected an atom, found {term_str(t)}", start)

    def _check_linear(self, t: Term, start: Token) -> None:
        def has_var(x: Term) -> bool:
            return bool(term_vars(x))

        def walk(x: Term) -> None:
            if isinstance(x, Compound):
                if x.functor == "*" and len(x.args) == 2 and has_var(x.args[0]) and has_var(x.args[1]):
                    self.error(f"non-linear expression {term_str(x)}", start, NonLinearError)
                if x.functor == "/" and len(x.args) == 2 and has_var(x.args[1]):
                    self.error(f"division by a non-constant in {term_str(x)}", start, NonLinearError)
                for a in x.args:
                    walk(a)

        walk(t)

    # terms and arithmetic
    def expr(self) -> Term:
        left = self.mul_expr()
        while self.tok.kind == "punct" and self.tok.text in ("+", "-"):
            op = self.tok.text
            self.i += 1
            left = _fold(op, left, self.mul_expr())
        return left

    def mul_expr(self) -> Term:
        left = self.unary()
        while self.tok.kind == "punct" and self.tok.text in ("*", "/"):
            op = self.tok.text
            self.i += 1
            right = self.unary()
            if op == "/" and isinstance(right, Rat) and right.value == 0:
                self.error("division by zero")
            left = _fold(op, left, right)
        return left

    def unary(self) -> Term:
        if self.tok.kind == "punct" and self.tok.text == "-":
            self.i += 1
            inner = self.unary()
            if isinstance(inner, Rat):
                return Rat(-inner.value)
            return Compound("-", (inner,))
        if self.tok.kind == "punct" and self.tok.text == "+":
            self.i += 1
            return self.unary()
        return self.primary()

    def primary(self) -> Term:
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return Rat(Fraction(t.text))
        if t.kind == "var":
            return self.variable()
        if t.kind == "atom":
            self.i += 1
            if self.tok.kind == "punct" and self.tok.text == "(" and self.tok.col == t.col + len(t.text) and self.tok.line == t.line:
                self.i += 1
                args = [self.expr()]
                while self.accept(","):
                    args.append(self.expr())
                self.expect(")")
                return Compound(t.text, tuple(args))
            return Const(t.text)
        if self.accept("("):
            inner = self.expr()
            self.expect(")")
            return inner
        if self.accept("["):
            if self.accept("]"):
                return Const(NIL)
            items = [self.expr()]
            while self.accept(","):
                items.append(self.expr())
            tail = None
            if self.accept("|"):
                tail = self.expr()
            self.expect("]")
            return mk_list(items, tail)
        self.error(f"unexpected {t.text or 'end of input'!r}")

    def variable(self) -> Var:
        t = self.tok
        self.i += 1
        if t.text == "_":
            return fresh_var("Anon")
        v = self.clause_vars.get(t.text)
        if v is None:
            v = self.clause_vars[t.text] = Var(t.text)
        return v


def _fold(op: str, a: Term, b: Term) -> Term:
    """Ground numeric arithmetic is evaluated at parse time (``15/2`` is a rational)."""
    if isinstance(a, Rat) and isinstance(b, Rat):
        x, y = a.value, b.value
        if op == "+":
            return Rat(x + y)
        if op == "-":
            return Rat(x - y)
        if op == "*":
            return Rat(x * y)
        return Rat(x / y)
    return Compound(op, (a, b))


# ---------------------------------------------------------------- public API


def parse_program(text: str, source: str | None = None) -> Program:
    prog = _Parser(text, source).program()
    for r in prog.rules:
        if r.head is not None and r.head.key[0].lstrip("-").startswith(HIDDEN_PREFIX):
            raise ScaspSyntaxError(f"predicate names starting with {HIDDEN_PREFIX!r} are reserved", r.line, 1, source)
    return prog


def parse_query(text: str) -> list:
    return _Parser(text).query()


def load_program(path: str | Path, _seen: tuple = ()) -> Program:
    """Parse a file and resolve ``#include`` directives relative to it."""
    path = Path(path).resolve()
    if path in _seen:
        raise ScaspSyntaxError(f"#include cycle through {path}")
    prog = parse_program(path.read_text(encoding="utf-8"), str(path))
    return _resolve_includes(prog, path.parent, _seen + (path,))


def load_text(text: str, base_dir: str | Path = ".", source: str | None = None) -> Program:
    prog = parse_program(text, source)
    return _resolve_includes(prog, Path(base_dir), ())


def _resolve_includes(prog: Program, base: Path, seen: tuple) -> Program:
    from . import ec

    out = Program(shows=list(prog.shows))
    for inc in prog.includes:
        lib = ec.library_path(inc)
        target = lib if lib is not None else (base / inc)
        if not target.exists() and target.suffix == "":
            for ext in (".pl", ".scasp"):
                if target.with_suffix(ext).exists():
                    target = target.with_suffix(ext)
                    break
        if not target.exists():
            raise ScaspSyntaxError(f"cannot resolve #include {inc}")
        out.extend(load_program(target, seen))
    out.rules.extend(prog.rules)
    out.abducibles.extend(prog.abducibles)
    return out


# ---------------------------------------------------------------- normalization


def normalize_rule(rule: Rule) -> Rule:
    """Rename apart and make head unifications explicit as leading ``=`` goals."""
    mapping = {v: fresh_var("V") for v in rule.variables()}
    body = [rename_goal(g, mapping) for g in rule.body]
    if rule.head is None:
        return Rule(None, tuple(body), rule.line)
    atom = substitute(rule.head.atom, mapping)
    if isinstance(atom, Const):
        return Rule(Lit(atom), tuple(body), rule.line)
    args = []
    eqs = []
    seen: set = set()
    for a in atom.args:
        if isinstance(a, Var) and a not in seen:
            seen.add(a)
            args.append(a)
        else:
            v = fresh_var("V")
            args.append(v)
            eqs.append(Constraint("=", v, a, False))
    head = Lit(Compound(atom.functor, tuple(args)))
    return Rule(head, tuple(eqs + body), rule.line)


def normalize(program: Program) -> Program:
    return Program(
        rules=[normalize_rule(r) for r in program.rules],
        includes=list(program.includes),
        abducibles=list(program.abducibles),
        shows=list(program.shows),
    )


class AbducibleError(Exception):
    pass


def abducible_aux_name(name: str) -> str:
    return f"{AUX_PREFIX}abd_{name.replace('-', 'neg_')}"


def expand_abducibles(program: Program) -> Program:
    """``#abducible a.`` becomes the even loop ``a :- not a'.  a' :- not a.``"""
    if not program.abducibles:
        return program
    rules = list(program.rules)
    for atom in program.abducibles:
        for r in program.rules:
            if r.head is not None and r.head.key == pred_key(atom) and _head_overlaps(r, atom):
                raise AbducibleError(f"abducible {term_str(atom)} also has ordinary rules (line {r.line})")
        name, _ = pred_key(atom)
        args = atom.args if isinstance(atom, Compound) else ()
        aux = Compound(abducible_aux_name(name), args) if args else Const(abducible_aux_name(name))
        rules.append(normalize_rule(Rule(Lit(atom), (Lit(aux, True),))))
        rules.append(normalize_rule(Rule(Lit(aux), (Lit(atom, True),))))
    return Program(rules=rules, includes=list(program.includes), abducibles=[], shows=list(program.shows))


def _head_overlaps(rule: Rule, atom: Term) -> bool:
    """Whether the (normalized) rule head can match ``atom``, honouring the
    leading equality constraints that normalization moved into the body."""
    from .clpq import Store

    ren = {v: fresh_var("R") for v in term_vars(_rule_as_term(rule))}
    st = Store().unify(substitute(rule.head.atom, ren), atom)
    for g in rule.body:
        if st is None or not isinstance(g, Constraint) or g.op != "=":
            break
        st = st.add_constraint(g.op, substitute(g.lhs, ren), substitute(g.rhs, ren), g.numeric)
    return st is not None


def rules_variant(a: Rule, b: Rule) -> bool:
    """Structural equality of two rules modulo variable renaming."""
    ta = _rule_as_term(a)
    tb = _rule_as_term(b)
    return is_variant(ta, tb)


def _rule_as_term(r: Rule) -> Term:
    def g(x: Goal) -> Term:
        if isinstance(x, Lit):
            return Compound("not" if x.negated else "call", (x.atom,))
        if isinstance(x, Constraint):
            return Compound("c", (Const(x.op), Const(str(x.numeric)), x.lhs, x.rhs))
        return Compound("forall", (x.var, g(x.goal)))

    head = r.head.atom if r.head is not None else Const("false")
    return Compound("rule", (head, mk_list([g(x) for x in r.body])))


def iter_literals(goals: Iterable[Goal]):
    for g in goals:
        if isinstance(g, Lit):
            yield g
        elif isinstance(g, Forall):
            yield from iter_literals([g.goal])
