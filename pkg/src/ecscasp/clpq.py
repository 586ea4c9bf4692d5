"""Exact constraint store: Herbrand unification and disequality plus linear
rational arithmetic solved by Gaussian elimination and Fourier-Motzkin.

A :class:`Store` is immutable.  Every operation returns a new store, or
``None`` when the result is inconsistent, so backtracking is free.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Iterator, Optional

from .terms import Compound, Const, Rat, Term, Var, term_str, var_serial

ZERO = Fraction(0)
ONE = Fraction(1)


class NonLinearError(ValueError):
    pass


class NotNumeric(ValueError):
    """A Herbrand constant or structure appeared inside arithmetic."""


def var_order(v: Var):
    return (var_serial(v), v.name)


# ---------------------------------------------------------------- linear forms


class Lin:
    """``sum(coeffs[v] * v) + const`` with exact coefficients; treated as immutable."""

    __slots__ = ("coeffs", "const", "_hash")

    def __init__(self, coeffs: dict | None = None, const=ZERO):
        self.coeffs = {v: c for v, c in (coeffs or {}).items() if c != 0}
        self.const = Fraction(const)
        self._hash = None

    @staticmethod
    def var(v: Var) -> "Lin":
        return Lin({v: ONE})

    def __add__(self, other: "Lin") -> "Lin":
        out = dict(self.coeffs)
        for v, c in other.coeffs.items():
            out[v] = out.get(v, ZERO) + c
        return Lin(out, self.const + other.const)

    def scale(self, k: Fraction) -> "Lin":
        return Lin({v: c * k for v, c in self.coeffs.items()}, self.const * k)

    def __sub__(self, other: "Lin") -> "Lin":
        return self + other.scale(-ONE)

    def __neg__(self) -> "Lin":
        return self.scale(-ONE)

    def is_const(self) -> bool:
        return not self.coeffs

    def vars(self) -> set:
        return set(self.coeffs)

    def subst(self, v: Var, expr: "Lin") -> "Lin":
        c = self.coeffs.get(v)
        if c is None:
            return self
        rest = dict(self.coeffs)
        del rest[v]
        return Lin(rest, self.const) + expr.scale(c)

    def solve_for(self, v: Var) -> "Lin":
        """Express ``v`` from ``self == 0``."""
        c = self.coeffs[v]
        rest = dict(self.coeffs)
        del rest[v]
        return Lin(rest, self.const).scale(-ONE / c)

    def normalized(self) -> "Lin":
        """Positive rescaling with the leading coefficient of magnitude one."""
        if not self.coeffs:
            return self
        lead = min(self.coeffs, key=var_order)
        return self.scale(ONE / abs(self.coeffs[lead]))

    def key(self):
        return (tuple(sorted(((var_order(v), c) for v, c in self.coeffs.items()))), self.const)

    def __eq__(self, other) -> bool:
        return isinstance(other, Lin) and self.coeffs == other.coeffs and self.const == other.const

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def evaluate(self, point: dict) -> Fraction:
        return self.const + sum((c * point[v] for v, c in self.coeffs.items()), ZERO)

    def to_term(self) -> Term:
        terms: list[Term] = []
        for v in sorted(self.coeffs, key=var_order):
            c = self.coeffs[v]
            t: Term = v if abs(c) == 1 else Compound("*", (Rat(abs(c)), v))
            terms.append(t if c > 0 else Compound("-", (t,)))
        if self.const != 0 or not terms:
            terms.append(Rat(self.const))
        out = terms[0]
        for t in terms[1:]:
            if isinstance(t, Compound) and t.functor == "-" and len(t.args) == 1:
                out = Compound("-", (out, t.args[0]))
            elif isinstance(t, Rat) and t.value < 0:
                out = Compound("-", (out, Rat(-t.value)))
            else:
                out = Compound("+", (out, t))
        return out

    def __repr__(self) -> str:
        return f"Lin({term_str(self.to_term())})"


class Ineq:
    """``lin < 0`` when strict, ``lin <= 0`` otherwise.

    The form is rescaled on construction so the leading coefficient has
    magnitude one; ``body`` identifies the variable part for deduplication.
    """

    __slots__ = ("lin", "strict", "body")

    def __init__(self, lin: Lin, strict: bool):
        if lin.coeffs:
            lead = min(lin.coeffs, key=var_order)
            c = lin.coeffs[lead]
            if c != 1 and c != -1:
                lin = lin.scale(ONE / abs(c))
        self.lin = lin
        self.strict = strict
        self.body = frozenset(lin.coeffs.items())

    def __eq__(self, other) -> bool:
        return isinstance(other, Ineq) and self.strict == other.strict and self.lin == other.lin

    def __hash__(self) -> int:
        return hash((self.body, self.lin.const, self.strict))

    def __repr__(self) -> str:
        return f"Ineq({self.lin!r} {'<' if self.strict else '=<'} 0)"

    def holds(self, point: dict) -> bool:
        x = self.lin.evaluate(point)
        return x < 0 if self.strict else x <= 0


def _const_ok(lin: Lin, strict: bool) -> bool:
    return lin.const < 0 if strict else lin.const <= 0


def _dedup(ineqs: Iterable[Ineq]) -> list[Ineq]:
    best: dict = {}
    for q in ineqs:
        prev = best.get(q.body)
        # larger const (or strict at equal const) is the tighter bound
        if (
            prev is None
            or q.lin.const > prev.lin.const
            or (q.lin.const == prev.lin.const and q.strict and not prev.strict)
        ):
            best[q.body] = q
    return list(best.values())


def fm_eliminate(ineqs: list[Ineq], v: Var) -> Optional[list[Ineq]]:
    """Eliminate ``v``; returns None if a constant contradiction appears."""
    pos, neg, rest = [], [], []
    for q in ineqs:
        c = q.lin.coeffs.get(v)
        if c is None:
            rest.append(q)
        elif c > 0:
            pos.append(q)
        else:
            neg.append(q)
    for p in pos:
        cp = p.lin.coeffs[v]
        for n in neg:
            cn = -n.lin.coeffs[v]
            lin = p.lin.scale(cn) + n.lin.scale(cp)
            strict = p.strict or n.strict
            if lin.is_const():
                if not _const_ok(lin, strict):
                    return None
            else:
                rest.append(Ineq(lin, strict))
    return _dedup(rest)


def fm_feasible(ineqs: list[Ineq]) -> bool:
    work = []
    for q in ineqs:
        if q.lin.is_const():
            if not _const_ok(q.lin, q.strict):
                return False
        else:
            work.append(q)
    work = _dedup(work)
    while work:
        vars_ = {}
        for q in work:
            for v, c in q.lin.coeffs.items():
                p, n = vars_.get(v, (0, 0))
                vars_[v] = (p + (c > 0), n + (c < 0))
        v = min(vars_, key=lambda x: (vars_[x][0] * vars_[x][1] - vars_[x][0] - vars_[x][1], var_order(x)))
        work = fm_eliminate(work, v)
        if work is None:
            return False
    return True


def fm_project(ineqs: list[Ineq], keep: set) -> Optional[list[Ineq]]:
    work = _dedup(q for q in ineqs if not q.lin.is_const())
    while True:
        elim = {v for q in work for v in q.lin.coeffs if v not in keep}
        if not elim:
            return work
        v = min(elim, key=var_order)
        work = fm_eliminate(work, v)
        if work is None:
            return None


def remove_redundant(ineqs: list[Ineq]) -> list[Ineq]:
    out = list(ineqs)
    i = 0
    while i < len(out):
        q = out[i]
        others = out[:i] + out[i + 1 :]
        # q is redundant if others together with its negation are infeasible
        if fm_feasible(others + [Ineq(-q.lin, not q.strict)]):
            i += 1
        else:
            out = others
    return out


# ---------------------------------------------------------------- the store


def _components(ineqs: list[Ineq], seed: set) -> list[Ineq]:
    """Inequalities transitively sharing variables with ``seed``."""
    reach = set(seed)
    chosen: list[Ineq] = []
    pending = list(ineqs)
    changed = True
    while changed:
        changed = False
        rest = []
        for q in pending:
            if q.lin.vars() & reach:
                chosen.append(q)
                reach |= q.lin.vars()
                changed = True
            else:
                rest.append(q)
        pending = rest
    return chosen


@dataclass(frozen=True)
class Store:
    subst: dict = field(default_factory=dict)
    diseqs: tuple = ()  # (lhs, rhs, variables at last check)
    eqs: dict = field(default_factory=dict)  # pivot var -> Lin over non-pivot vars
    ineqs: tuple = ()
    neqs: tuple = ()  # Lin != 0
    nvars: frozenset = frozenset()  # variables occurring in the numeric part

    # ------------------------------------------------------------ lookup

    def walk(self, t: Term) -> Term:
        s = self.subst
        while isinstance(t, Var):
            nxt = s.get(t)
            if nxt is None:
                return t
            t = nxt
        return t

    def resolve(self, t: Term) -> Term:
        t = self.walk(t)
        if isinstance(t, Compound):
            return Compound(t.functor, tuple(self.resolve(a) for a in t.args))
        return t

    def numeric_vars(self) -> set:
        return set(self.nvars)

    def is_numeric(self, v: Var) -> bool:
        return v in self.nvars

    def linearize(self, t: Term) -> Lin:
        return _linearize(t, self._lin_leaf)

    def _lin_leaf(self, t: Term) -> Term | Lin:
        t = self.walk(t)
        if isinstance(t, Var):
            e = self.eqs.get(t)
            return e if e is not None else Lin.var(t)
        return t

    # ------------------------------------------------------------ Herbrand

    def unify(self, a: Term, b: Term) -> Optional["Store"]:
        subst = dict(self.subst)
        numeric_eqs: list[Lin] = []
        if not _unify_into(self, subst, a, b, numeric_eqs):
            return None
        bound = subst.keys() - self.subst.keys()
        st = replace(self, subst=subst)
        if numeric_eqs:
            st = st._add_numeric(eqs=numeric_eqs, bound=bound)
            if st is None:
                return None
            return st
        return st._recheck_diseqs(bound)

    def _recheck_diseqs(self, bound: set) -> Optional["Store"]:
        """Re-examine the disequalities mentioning a newly bound variable."""
        if not bound or not self.diseqs:
            return self
        kept = []
        changed = False
        for entry in self.diseqs:
            a, b, vs = entry
            if not (vs & bound):
                kept.append(entry)
                continue
            changed = True
            status = self._diseq_status(a, b)
            if status is False:
                return None
            if status is None:
                kept.append(self._diseq_entry(a, b))
        if not changed:
            return self
        return replace(self, diseqs=tuple(kept))

    def _diseq_entry(self, a: Term, b: Term) -> tuple:
        ra, rb = self.resolve(a), self.resolve(b)
        return (ra, rb, frozenset(_vars(ra)) | frozenset(_vars(rb)))

    def _diseq_status(self, a: Term, b: Term):
        """True: never equal any more.  False: already equal.  None: undecided."""
        theta = herbrand_mgu(self, a, b)
        if theta is None:
            return True
        if not theta:
            return False
        decided_equal = True
        for v, t in theta:
            if self.is_numeric(v) or (isinstance(t, Var) and self.is_numeric(t)):
                try:
                    diff = self.linearize(v) - self.linearize(t)
                except (NotNumeric, NonLinearError):
                    return True
                if diff.is_const():
                    if diff.const != 0:
                        return True
                    continue
            decided_equal = False
        return False if decided_equal else None

    def diff_choices(self, a: Term, b: Term) -> Iterator["Store"]:
        """Alternative stores in which ``a`` and ``b`` differ (disjoint cases)."""
        theta = herbrand_mgu(self, a, b)
        if theta is None:
            yield self
            return
        if not theta:
            return
        if len(theta) == 1:
            v, t = theta[0]
            if isinstance(t, Rat) and self.is_numeric(v):
                for op in ("<", ">"):
                    st = self.add_numeric(op, v, t)
                    if st is not None:
                        yield st
                return
            entry = self._diseq_entry(v, t)
            if any(e[0] == entry[0] and e[1] == entry[1] for e in self.diseqs):
                yield self
            else:
                yield replace(self, diseqs=self.diseqs + (entry,))
            return
        cur: Optional[Store] = self
        for v, t in theta:
            for alt in cur.diff_choices(v, t):
                yield alt
            cur = cur.unify(v, t)
            if cur is None:
                return

    # ------------------------------------------------------------ numeric

    def add_numeric(self, op: str, lhs: Term, rhs: Term) -> Optional["Store"]:
        try:
            lin = self.linearize(lhs) - self.linearize(rhs)
        except NotNumeric:
            return None
        if op == "<":
            return self._add_numeric(ineqs=[Ineq(lin, True)])
        if op == ">":
            return self._add_numeric(ineqs=[Ineq(-lin, True)])
        if op == "=<":
            return self._add_numeric(ineqs=[Ineq(lin, False)])
        if op == ">=":
            return self._add_numeric(ineqs=[Ineq(-lin, False)])
        if op == "=":
            return self._add_numeric(eqs=[lin])
        if op == "\\=":
            return self._add_numeric(neqs=[lin])
        raise ValueError(f"unknown numeric operator {op}")

    def _add_numeric(self, eqs=(), ineqs=(), neqs=(), bound=()) -> Optional["Store"]:
        subst = dict(self.subst)
        solved = dict(self.eqs)
        cur_ineqs = list(self.ineqs)
        cur_neqs = list(self.neqs)
        pending_eqs = list(eqs)
        touched: set = set()
        for q in ineqs:
            touched |= q.lin.vars()
            cur_ineqs.append(q)
        for lin in neqs:
            cur_neqs.append(lin)
        while True:
            # Gaussian step for each pending equation
            while pending_eqs:
                lin = pending_eqs.pop()
                for p, e in solved.items():
                    lin = lin.subst(p, e)
                if lin.is_const():
                    if lin.const != 0:
                        return None
                    continue
                pivot = max(lin.coeffs, key=var_order)
                expr = lin.solve_for(pivot)
                touched |= lin.vars()
                solved = {p: e.subst(pivot, expr) for p, e in solved.items()}
                solved[pivot] = expr
                for q in cur_ineqs:
                    if pivot in q.lin.coeffs:
                        touched |= q.lin.vars()
                cur_ineqs = [
                    Ineq(q.lin.subst(pivot, expr), q.strict) if pivot in q.lin.coeffs else q for q in cur_ineqs
                ]
                cur_neqs = [n.subst(pivot, expr) for n in cur_neqs]
            # constant checks
            kept = []
            for q in cur_ineqs:
                if q.lin.is_const():
                    if not _const_ok(q.lin, q.strict):
                        return None
                else:
                    kept.append(q)
            cur_ineqs = _dedup(kept)
            comp = _components(cur_ineqs, touched) if touched else []
            if comp and not fm_feasible(comp):
                return None
            # implied equalities among non-strict bounds of the touched part;
            # a non-empty interior rules them all out at once
            implied = []
            loose = [q for q in comp if not q.strict]
            if loose and not fm_feasible([Ineq(q.lin, True) for q in comp]):
                for q in loose:
                    if not fm_feasible(comp + [Ineq(q.lin, True)]):
                        implied.append(q)
            if not implied:
                break
            drop = set(id(q) for q in implied)
            cur_ineqs = [q for q in cur_ineqs if id(q) not in drop]
            pending_eqs.extend(q.lin for q in implied)
        kept_neqs = []
        for n in cur_neqs:
            if n.is_const():
                if n.const == 0:
                    return None
            elif n.normalized() not in {k.normalized() for k in kept_neqs}:
                kept_neqs.append(n)
        # determined variables leave the numeric part and become bindings
        final_eqs = {}
        newly = set(bound)
        for p, e in solved.items():
            if e.is_const():
                subst[p] = Rat(e.const)
                newly.add(p)
            elif len(e.coeffs) == 1 and e.const == 0 and next(iter(e.coeffs.values())) == 1:
                subst[p] = next(iter(e.coeffs))
                newly.add(p)
            else:
                final_eqs[p] = e
        nvars = set(final_eqs)
        for e in final_eqs.values():
            nvars |= e.vars()
        for q in cur_ineqs:
            nvars |= q.lin.vars()
        for n in kept_neqs:
            nvars |= n.vars()
        st = Store(subst, self.diseqs, final_eqs, tuple(cur_ineqs), tuple(kept_neqs), frozenset(nvars))
        return st._recheck_diseqs(newly)

    def add_constraint(self, op: str, lhs: Term, rhs: Term, numeric: bool = True) -> Optional["Store"]:
        """Single-outcome constraint posting.  Herbrand ``\\=`` keeps the first
        disjoint case only when it is the sole case; use :meth:`choices` in search."""
        alts = list(self.choices(op, lhs, rhs, numeric))
        if not alts:
            return None
        if len(alts) == 1:
            return alts[0]
        if not numeric and op == "\\=":
            # several disjoint cases: keep the disequality pending instead
            return replace(self, diseqs=self.diseqs + (self._diseq_entry(lhs, rhs),))
        return alts[0]

    def choices(self, op: str, lhs: Term, rhs: Term, numeric: bool = True) -> Iterator["Store"]:
        if numeric:
            try:
                st = self.add_numeric(op, lhs, rhs)
            except NotNumeric:
                st = None
            if st is not None:
                yield st
        elif op == "=":
            st = self.unify(lhs, rhs)
            if st is not None:
                yield st
        elif op == "\\=":
            yield from self.diff_choices(lhs, rhs)
        else:
            raise ValueError(f"unknown Herbrand operator {op}")

    def consistent_with(self, op: str, lhs: Term, rhs: Term, numeric: bool = True) -> bool:
        return next(self.choices(op, lhs, rhs, numeric), None) is not None

    def entails(self, op: str, lhs: Term, rhs: Term, numeric: bool = True) -> bool:
        """True iff every negation branch of the constraint is inconsistent."""
        return not any(self.consistent_with(o, lhs, rhs, n) for o, n in negation_branches(op, numeric))

    # ------------------------------------------------------------ projection

    def component_vars(self, seed: set) -> set:
        """Numeric variables linked to ``seed`` through shared constraints."""
        lins = [e - Lin.var(p) for p, e in self.eqs.items()] + [q.lin for q in self.ineqs] + list(self.neqs)
        comp = _components([Ineq(x, False) for x in lins], seed)
        out = set(seed)
        for q in comp:
            out |= q.lin.vars()
        return out

    def numeric_projection(self, keep: set) -> list[tuple[str, Lin]]:
        """Constraints ``lin op 0`` over ``keep`` equivalent to the store's
        numeric part with every other variable existentially eliminated."""
        rows: list[Lin] = [e - Lin.var(p) for p, e in self.eqs.items()]
        ineqs = list(self.ineqs)
        neqs = list(self.neqs)
        relevant = _components(ineqs + [Ineq(r, False) for r in rows] + [Ineq(n, False) for n in neqs], keep)
        rel_ids = {id(q.lin) for q in relevant}
        rows = [r for r in rows if id(r) in rel_ids]
        ineqs = [q for q in ineqs if id(q.lin) in rel_ids]
        neqs = [n for n in neqs if id(n) in rel_ids]
        # Gaussian elimination of non-kept variables
        changed = True
        while changed:
            changed = False
            for i, r in enumerate(rows):
                elim = [v for v in r.coeffs if v not in keep]
                if elim:
                    v = max(elim, key=var_order)
                    expr = r.solve_for(v)
                    rows = [x.subst(v, expr) for j, x in enumerate(rows) if j != i]
                    rows = [x for x in rows if not x.is_const()]
                    ineqs = [Ineq(q.lin.subst(v, expr), q.strict) for q in ineqs]
                    neqs = [n.subst(v, expr) for n in neqs]
                    changed = True
                    break
        proj = fm_project([q for q in ineqs if not q.lin.is_const()], keep) or []
        proj = remove_redundant(proj)
        out: list[tuple[str, Lin]] = [("=", r) for r in rows]
        for q in proj:
            out.append(("<" if q.strict else "=<", q.lin))
        for n in neqs:
            if n.vars() <= keep and not n.is_const():
                out.append(("\\=", n))
        return out

    def project(self, vars_: Iterable[Var]) -> list[tuple[str, Term, Term, bool]]:
        """Constraints on ``vars_``: numeric ones as ``(op, lhs, rhs, True)``
        solved for the oldest variable, Herbrand disequalities as
        ``('\\\\=', lhs, rhs, False)``."""
        keep = {v for v in (self.walk(x) for x in vars_) if isinstance(v, Var)}
        out = []
        for op, lin in self.numeric_projection(keep):
            out.append(lin_constraint(op, lin))
        for a, b, _ in self.diseqs:
            ra, rb = self.resolve(a), self.resolve(b)
            vs = set(_vars(ra)) | set(_vars(rb))
            if vs and vs <= keep and not self._diseq_numeric_redundant(ra, rb):
                out.append(("\\=", ra, rb, False))
        return out

    def _diseq_numeric_redundant(self, a: Term, b: Term) -> bool:
        """A disequality already implied by the numeric constraints."""
        if isinstance(a, Var) and isinstance(b, Rat) and self.is_numeric(a):
            return self.entails("\\=", a, b, True)
        return False

    def __str__(self) -> str:
        parts = []
        for v in sorted(self.subst, key=var_order):
            parts.append(f"{v} = {term_str(self.resolve(v))}")
        for p, e in self.eqs.items():
            parts.append(f"{p} .=. {term_str(e.to_term())}")
        for q in self.ineqs:
            parts.append(f"{term_str(q.lin.to_term())} {'.<.' if q.strict else '.=<.'} 0")
        for n in self.neqs:
            parts.append(f"{term_str(n.to_term())} .\\=. 0")
        for a, b, _ in self.diseqs:
            parts.append(f"{term_str(self.resolve(a))} \\= {term_str(self.resolve(b))}")
        return ", ".join(parts) if parts else "true"


def lin_constraint(op: str, lin: Lin) -> tuple[str, Term, Term, bool]:
    """``lin op 0`` rewritten as ``v op' rhs`` for the oldest variable ``v``."""
    v = min(lin.coeffs, key=var_order)
    c = lin.coeffs[v]
    rhs = lin.solve_for(v)
    flip = {"<": ">", "=<": ">=", "=": "=", "\\=": "\\="}
    return (op if c > 0 else flip[op], v, _rhs_term(rhs), True)


def _rhs_term(lin: Lin) -> Term:
    if lin.is_const():
        return Rat(lin.const)
    return lin.to_term()


NEGATIONS = {
    ("<", True): [(">=", True)],
    (">", True): [("=<", True)],
    ("=<", True): [(">", True)],
    (">=", True): [("<", True)],
    ("=", True): [("<", True), (">", True)],
    ("\\=", True): [("=", True)],
    ("=", False): [("\\=", False)],
    ("\\=", False): [("=", False)],
}


def negation_branches(op: str, numeric: bool) -> list[tuple[str, bool]]:
    return NEGATIONS[(op, numeric)]


def _vars(t: Term):
    if isinstance(t, Var):
        yield t
    elif isinstance(t, Compound):
        for a in t.args:
            yield from _vars(a)


def _occurs(store_walk, v: Var, t: Term) -> bool:
    stack = [t]
    while stack:
        x = store_walk(stack.pop())
        if x == v:
            return True
        if isinstance(x, Compound):
            stack.extend(x.args)
    return False


def _unify_into(store: Store, subst: dict, a: Term, b: Term, numeric_eqs: list) -> bool:
    def walk(t):
        while isinstance(t, Var):
            n = subst.get(t)
            if n is None:
                return t
            t = n
        return t

    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        x, y = walk(x), walk(y)
        if x == y:
            continue
        if isinstance(x, Var) and isinstance(y, Var):
            nx, ny = store.is_numeric(x), store.is_numeric(y)
            if nx and ny:
                numeric_eqs.append(Lin.var(x) - Lin.var(y))
            elif nx:
                subst[y] = x
            else:
                # bind the newer variable to the older one
                if var_order(x) < var_order(y):
                    subst[y] = x
                else:
                    subst[x] = y
            continue
        if isinstance(y, Var):
            x, y = y, x
        if isinstance(x, Var):
            if store.is_numeric(x):
                if isinstance(y, Rat):
                    numeric_eqs.append(Lin.var(x) - Lin({}, y.value))
                    continue
                return False
            if _occurs(walk, x, y):
                return False
            subst[x] = y
            continue
        if isinstance(x, Compound) and isinstance(y, Compound):
            if x.functor != y.functor or len(x.args) != len(y.args):
                return False
            stack.extend(zip(x.args, y.args))
            continue
        return False
    return True


def herbrand_mgu(store: Store, a: Term, b: Term) -> Optional[list[tuple[Var, Term]]]:
    """Most general unifier of ``a`` and ``b`` relative to the store's
    substitution, as an ordered list of new bindings; None if not unifiable."""
    subst: dict = {}
    order: list[tuple[Var, Term]] = []

    def walk(t):
        while isinstance(t, Var):
            n = subst.get(t)
            if n is None:
                n = store.subst.get(t)
                if n is None:
                    return t
            t = n
        return t

    stack = [(a, b)]
    while stack:
        x, y = stack.pop(0)
        x, y = walk(x), walk(y)
        if x == y:
            continue
        if isinstance(x, Var) and isinstance(y, Var):
            if var_order(x) < var_order(y):
                x, y = y, x
            subst[x] = y
            order.append((x, y))
            continue
        if isinstance(y, Var):
            x, y = y, x
        if isinstance(x, Var):
            if _occurs(walk, x, y):
                return None
            subst[x] = y
            order.append((x, y))
            continue
        if isinstance(x, Compound) and isinstance(y, Compound):
            if x.functor != y.functor or len(x.args) != len(y.args):
                return None
            stack.extend(zip(x.args, y.args))
            continue
        return None
    return order


def term_to_lin(t: Term) -> Lin:
    """Linear form of an already resolved arithmetic term."""
    return _linearize(t, lambda x: Lin.var(x) if isinstance(x, Var) else x)


def _linearize(t: Term, leaf) -> Lin:
    t = leaf(t)
    if isinstance(t, Lin):
        return t
    if isinstance(t, Rat):
        return Lin({}, t.value)
    if isinstance(t, Compound) and t.functor in ("+", "-", "*", "/"):
        if len(t.args) == 1:
            if t.functor == "-":
                return -_linearize(t.args[0], leaf)
            if t.functor == "+":
                return _linearize(t.args[0], leaf)
        elif len(t.args) == 2:
            a = _linearize(t.args[0], leaf)
            b = _linearize(t.args[1], leaf)
            if t.functor == "+":
                return a + b
            if t.functor == "-":
                return a - b
            if t.functor == "*":
                if a.is_const():
                    return b.scale(a.const)
                if b.is_const():
                    return a.scale(b.const)
                raise NonLinearError(f"non-linear product {term_str(t)}")
            if not b.is_const():
                raise NonLinearError(f"division by a non-constant in {term_str(t)}")
            if b.const == 0:
                raise NotNumeric("division by zero")
            return a.scale(ONE / b.const)
    raise NotNumeric(f"{term_str(t)} is not a number")
