"""Top-down evaluation over the compiled program.

Positive calls resolve against program clauses, ``not`` calls against the dual
rules.  Loops are decided from the call ancestry: a call that meets its own
complement fails, a variant reached through a change of polarity succeeds
coinductively, and a purely positive variant loop fails.  Universally
quantified goals are proved by carving the domain of the quantified variable
into regions until every region is covered.
"""

from __future__ import annotations

import sys
import threading
from dataclasses import dataclass, field, replace
from typing import Iterator, Optional

from .clpq import Store, negation_branches, term_to_lin
from .dualgen import CompiledProgram, compile_program
from .syntax import AUX_PREFIX, HIDDEN_PREFIX, Constraint, Forall, Goal, Lit, Program, goal_vars, rename_goal
from .terms import Compound, Const, Rat, Term, Var, fresh_var, is_variant, substitute, term_vars, var_serial

DEFAULT_FORALL_CAP = 1024


def is_hidden(key) -> bool:
    """Compiler-generated helpers, which are transparent to loop detection."""
    name = key[0].lstrip("-")
    return name.startswith(HIDDEN_PREFIX) and not name.startswith(AUX_PREFIX)


def is_printed(key) -> bool:
    return not key[0].lstrip("-").startswith(HIDDEN_PREFIX)


def classical_complement(atom: Term) -> Term:
    name = atom.name if isinstance(atom, Const) else atom.functor
    other = name[1:] if name.startswith("-") else "-" + name
    return Const(other) if isinstance(atom, Const) else Compound(other, atom.args)


@dataclass(frozen=True)
class Node:
    """Justification node: a literal (or constraint) and the goals proving it."""

    goal: object
    children: tuple = ()
    how: str = "rule"  # rule | coinductive | proved | constraint


@dataclass(frozen=True, slots=True)
class Link:
    negated: bool
    atom: Term
    parent: Optional["Link"]
    key: tuple = ()


def _push(lit: Lit, parent: Optional[Link]) -> Link:
    return Link(lit.negated, lit.atom, parent, lit.key)


def _complement_key(key: tuple) -> tuple:
    name, arity = key
    return (name[1:] if name.startswith("-") else "-" + name, arity)


@dataclass(frozen=True)
class State:
    store: Store
    proven: Optional[Link] = None


@dataclass
class RunStats:
    truncated: bool = False
    diagnostics: list = field(default_factory=list)


def _links(link: Optional[Link]):
    while link is not None:
        yield link
        link = link.parent


class Engine:
    def __init__(
        self,
        program: CompiledProgram | Program,
        depth_limit: int | None = None,
        nmr: bool = True,
        forall_cap: int = DEFAULT_FORALL_CAP,
    ):
        if isinstance(program, Program):
            program = compile_program(program)
        self.program = program
        self.depth_limit = depth_limit
        self.use_nmr = nmr
        self.forall_cap = forall_cap
        self.stats = RunStats()
        self._rule_cache: dict = {}

    # ------------------------------------------------------------ entry

    def solve_raw(self, query: list) -> Iterator[tuple[State, tuple, tuple]]:
        """Yields ``(state, query_nodes, nmr_nodes)`` for each answer that passes the check."""
        state = State(Store())
        for st, nodes in self.solve_goals(tuple(query), None, state, 0):
            if self.use_nmr and self.program.nmr_goal is not None:
                for st2, nmr_nodes in self.solve_goal(self.program.nmr_goal, None, st, 0):
                    if self._model_consistent(st2):
                        yield st2, nodes, nmr_nodes
            elif self._model_consistent(st):
                yield st, nodes, ()

    def _model_consistent(self, state: State) -> bool:
        seen: dict = {}
        store = state.store
        for link in _links(state.proven):
            atom = store.resolve(link.atom)
            seen.setdefault((link.negated, atom), True)
        for neg, atom in seen:
            if (not neg, atom) in seen:
                return False
            if not neg and (False, classical_complement(atom)) in seen:
                return False
        return True

    # ------------------------------------------------------------ conjunctions

    def solve_goals(self, goals: tuple, anc, state: State, depth: int):
        n = len(goals)
        if n == 0:
            yield state, ()
            return
        stack = [self.solve_goal(goals[0], anc, state, depth)]
        partial: list = [()] * n
        while stack:
            try:
                st, nodes = next(stack[-1])
            except StopIteration:
                stack.pop()
                continue
            k = len(stack) - 1
            partial[k] = nodes
            if k + 1 == n:
                yield st, tuple(x for part in partial for x in part)
            else:
                stack.append(self.solve_goal(goals[k + 1], anc, st, depth))

    def solve_goal(self, goal: Goal, anc, state: State, depth: int):
        if isinstance(goal, Lit):
            return self.solve_lit(goal, anc, state, depth)
        if isinstance(goal, Constraint):
            return self._solve_constraint(goal, state)
        if isinstance(goal, Forall):
            return self.eval_forall(goal, anc, state, depth)
        raise TypeError(f"unknown goal {goal!r}")

    def _solve_constraint(self, c: Constraint, state: State):
        for st in state.store.choices(c.op, c.lhs, c.rhs, c.numeric):
            yield State(st, state.proven), (Node(c, how="constraint"),)

    # ------------------------------------------------------------ literals

    def solve_lit(self, lit: Lit, anc: Optional[Link], state: State, depth: int):
        key = lit.key
        hidden = is_hidden(key)
        store = state.store
        if not hidden:
            atom = store.resolve(lit.atom)
            ckey = None if lit.negated else _complement_key(key)
            comp = None
            for link in _links(state.proven):
                if link.key == key:
                    if store.resolve(link.atom) == atom:
                        if link.negated != lit.negated:
                            return
                        yield state, (Node(lit, how="proved"),)
                        return
                elif link.key == ckey and not link.negated:
                    if comp is None:
                        comp = classical_complement(atom)
                    if store.resolve(link.atom) == comp:
                        return
            flips = False
            for link in _links(anc):
                if link.negated != lit.negated:
                    flips = True
                    if link.key == key and store.resolve(link.atom) == atom:
                        return
                    continue
                if link.key != key:
                    continue
                other = store.resolve(link.atom)
                if is_variant(other, atom):
                    if not flips and not lit.negated:
                        return
                    st = store.unify(other, atom)
                    if st is None:
                        return
                    yield State(st, _push(lit, state.proven)), (
                        Node(lit, how="coinductive"),
                    )
                    return
        if self.depth_limit is not None and depth >= self.depth_limit:
            self.stats.truncated = True
            return
        table = self.program.duals if lit.negated else self.program.rules
        clauses = table.get(key)
        if clauses is None:
            if lit.negated:
                # no positive definition and no dual: unconditionally true
                yield self._record(lit, state, hidden), (Node(lit),)
            return
        new_anc = anc if hidden else _push(lit, anc)
        args = lit.atom.args if isinstance(lit.atom, Compound) else ()
        for rule in clauses:
            body = self._instantiate(rule, args)
            for st, nodes in self.solve_goals(body, new_anc, state, depth + 1):
                if hidden:
                    yield st, nodes
                    continue
                rec = self._record(lit, st, hidden)
                if rec is None:
                    continue
                yield rec, (Node(lit, nodes),)

    def _record(self, lit: Lit, state: State, hidden: bool) -> Optional[State]:
        if hidden:
            return state
        if not lit.negated:
            store = state.store
            ckey = _complement_key(lit.key)
            comp = None
            for link in _links(state.proven):
                if link.key == ckey and not link.negated:
                    if comp is None:
                        comp = classical_complement(store.resolve(lit.atom))
                    if store.resolve(link.atom) == comp:
                        return None
        return State(state.store, _push(lit, state.proven))

    def _instantiate(self, rule, args: tuple) -> tuple:
        info = self._rule_cache.get(id(rule))
        if info is None:
            head_vars = tuple(rule.head.atom.args) if isinstance(rule.head.atom, Compound) else ()
            body_vars: dict = {}
            for g in rule.body:
                goal_vars(g, body_vars)
            local = tuple(v for v in body_vars if v not in head_vars)
            info = (head_vars, local, rule)
            self._rule_cache[id(rule)] = info
        head_vars, local, _ = info
        mapping = dict(zip(head_vars, args))
        for v in local:
            mapping[v] = fresh_var("G")
        return tuple(rename_goal(g, mapping) for g in rule.body)

    # ------------------------------------------------------------ forall

    def eval_forall(self, fa: Forall, anc, state: State, depth: int):
        outer = [v for v in goal_vars(fa.goal) if v != fa.var]
        budget = [0]
        yield from self._carve(fa.var, fa.goal, outer, anc, state, depth, [()], budget)

    def _carve(self, v: Var, goal: Goal, outer: list, anc, state: State, depth: int, pending: list, budget: list):
        if not pending:
            yield state, ()
            return
        region, rest = pending[0], pending[1:]
        budget[0] += 1
        if budget[0] > self.forall_cap:
            self.stats.diagnostics.append(f"forall region limit ({self.forall_cap}) reached; branch abandoned")
            return
        vk = fresh_var("F")
        mark = var_serial(vk)
        st0: Optional[Store] = state.store
        for op, rhs, numeric in region:
            st0 = st0.add_constraint(op, vk, rhs, numeric)
            if st0 is None:
                break
        if st0 is None:
            yield from self._carve(v, goal, outer, anc, state, depth, rest, budget)
            return
        g = rename_goal(goal, {v: vk})
        sig0 = self._signature(state.store, outer)
        for sol, nodes in self.solve_goal(g, anc, State(st0, state.proven), depth):
            cv = self._extract(sol.store, vk, mark)
            if cv is None:
                continue
            cv = [c for c in cv if not st0.entails(c[0], vk, c[1], c[2])]
            regions = []
            for i, (op, rhs, numeric) in enumerate(cv):
                for nop, nnum in negation_branches(op, numeric):
                    regions.append(region + tuple(cv[:i]) + ((nop, rhs, nnum),))
            for fin, more in self._carve(v, goal, outer, anc, sol, depth, regions + rest, budget):
                yield fin, nodes + more
            if self._signature(sol.store, outer) == sig0:
                return

    def _signature(self, store: Store, outer: list):
        resolved = tuple(store.resolve(x) for x in outer)
        vs: dict = {}
        for t in resolved:
            term_vars(t, vs)
        return resolved, tuple(sorted(map(repr, store.project(list(vs)))))

    def _extract(self, store: Store, vk: Var, mark: int) -> Optional[list]:
        """Constraints the solution places on ``vk`` in terms of older variables,
        or None when they cannot be expressed (structure over fresh variables)."""
        eff = store.walk(vk)

        def is_old(x: Var) -> bool:
            return var_serial(x) < mark

        if not isinstance(eff, Var):
            t = store.resolve(eff)
            if all(is_old(x) for x in term_vars(t)):
                return [("=", t, False)]
            return None
        if is_old(eff):
            return [("=", eff, False)]
        out = []
        for a, b, _ in store.diseqs:
            ra, rb = store.resolve(a), store.resolve(b)
            if ra == eff:
                other = rb
            elif rb == eff:
                other = ra
            else:
                continue
            if all(is_old(x) for x in term_vars(other)):
                out.append(("\\=", other, False))
        if store.is_numeric(eff):
            keep = {x for x in store.component_vars({eff}) if is_old(x)} | {eff}
            for op, lhs, rhs, _ in store.project(list(keep)):
                if op == "\\=" and not isinstance(lhs, Var):
                    continue
                c = _about(eff, op, store, lhs, rhs, keep)
                if c is not None:
                    out.append(c)
        return out


def _about(eff: Var, op: str, store: Store, lhs: Term, rhs: Term, keep: set):
    """Rewrite a projected numeric constraint as ``eff op rhs`` if it mentions eff."""
    try:
        lin = term_to_lin(lhs) - term_to_lin(rhs)
    except ValueError:
        return None
    if eff not in lin.coeffs:
        return None
    c = lin.coeffs[eff]
    expr = lin.solve_for(eff)
    flip = {"<": ">", ">": "<", "=<": ">=", ">=": "=<", "=": "=", "\\=": "\\="}
    oper = op if c > 0 else flip[op]
    rhs_term = Rat(expr.const) if expr.is_const() else expr.to_term()
    return (oper, rhs_term, True)


# ---------------------------------------------------------------- helpers


def run_with_big_stack(fn, *args, stack_mb: int = 512, **kwargs):
    """Run ``fn`` in a thread with a large stack; deep goal chains need it."""
    result: dict = {}

    def target():
        try:
            result["value"] = fn(*args, **kwargs)
        except BaseException as exc:  # re-raised in the caller
            result["error"] = exc

    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 200000))
    old_size = threading.stack_size()
    threading.stack_size(stack_mb * 1024 * 1024)
    try:
        t = threading.Thread(target=target)
        t.start()
        t.join()
    finally:
        threading.stack_size(old_size)
    if "error" in result:
        raise result["error"]
    return result.get("value")


# ---------------------------------------------------------------- answers


@dataclass(frozen=True)
class ModelLiteral:
    negated: bool
    atom: Term

    @property
    def key(self):
        return (self.atom.name, 0) if isinstance(self.atom, Const) else (self.atom.functor, len(self.atom.args))


@dataclass
class Answer:
    """A partial stable model with the store it was found under."""

    model: list
    query: list
    query_vars: list
    store: Store
    justification: tuple
    nmr_justification: tuple = ()

    def bindings(self) -> dict:
        out = {}
        for v in self.query_vars:
            t = self.store.resolve(v)
            if t != v:
                out[v] = t
        return out

    def query_constraints(self) -> list:
        vs: dict = {}
        for v in self.query_vars:
            term_vars(self.store.resolve(v), vs)
        return self.store.project(list(vs))

    def var_constraints(self, v: Var) -> list:
        return self.store.project([v])

    def value(self, name: str) -> Term:
        for v in self.query_vars:
            if v.name == name:
                return self.store.resolve(v)
        raise KeyError(name)


def assemble_answer(state: State, query: list, nodes: tuple, nmr_nodes: tuple = ()) -> Answer:
    store = state.store
    qvars: dict = {}
    for g in query:
        goal_vars(g, qvars)
    model: list = []
    seen: set = set()

    def visit(node: Node):
        g = node.goal
        if isinstance(g, Lit) and is_printed(g.key):
            atom = store.resolve(g.atom)
            if (g.negated, atom) not in seen:
                seen.add((g.negated, atom))
                model.append(ModelLiteral(g.negated, atom))
        for c in node.children:
            visit(c)

    for n in nodes:
        visit(n)
    return Answer(model, list(query), [v for v in qvars if not v.name.startswith("_")], store, nodes, nmr_nodes)


def solve(
    program: CompiledProgram | Program,
    query: list,
    depth_limit: int | None = None,
    nmr: bool = True,
    engine: Engine | None = None,
) -> Iterator[Answer]:
    """Lazy stream of distinct answers."""
    from .render import answer_text

    eng = engine or Engine(program, depth_limit=depth_limit, nmr=nmr)
    seen: set = set()
    for st, nodes, nmr_nodes in eng.solve_raw(query):
        ans = assemble_answer(st, query, nodes, nmr_nodes)
        text = answer_text(ans)
        if text in seen:
            continue
        seen.add(text)
        yield ans


def solve_all(program, query, limit: int = 0, **kwargs) -> list[Answer]:
    """Collect up to ``limit`` answers (0 = all) on a large-stack thread."""

    def run():
        out = []
        for ans in solve(program, query, **kwargs):
            out.append(ans)
            if limit and len(out) >= limit:
                break
        return out

    return run_with_big_stack(run)
