"""Program compilation: dual rules for constructive negation and the NMR check
(collected denials plus rules lying on odd negation cycles)."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Optional

from .syntax import (
    HIDDEN_PREFIX,
    Constraint,
    Forall,
    Goal,
    Lit,
    Program,
    Rule,
    goal_vars,
    iter_literals,
    normalize,
    expand_abducibles,
    rules_variant,
)
from .terms import Compound, Const, Term, Var, fresh_var, term_vars
from .clpq import negation_branches

NMR_GOAL = Lit(Const(HIDDEN_PREFIX + "nmr"))


def negate_constraint(c: Constraint) -> list[Constraint]:
    """Constraints whose solution sets together form the complement of ``c``."""
    return [Constraint(op, c.lhs, c.rhs, num) for op, num in negation_branches(c.op, c.numeric)]


def negate_goal(g: Goal) -> list[Goal]:
    if isinstance(g, Lit):
        return [Lit(g.atom, not g.negated)]
    if isinstance(g, Constraint):
        return negate_constraint(g)
    raise ValueError("universally quantified goals have no dual")


def _mangle(name: str) -> str:
    return name.replace("-", "neg_")


def helper_name(name: str, i: int, local: bool = False) -> str:
    base = name if name.startswith(HIDDEN_PREFIX) else HIDDEN_PREFIX + _mangle(name)
    return f"{base}_{i}{'_x' if local else ''}"


def _atom(name: str, args) -> Term:
    args = tuple(args)
    return Compound(name, args) if args else Const(name)


def _sorted_vars(vs) -> list[Var]:
    return list(vs)


def synthesize_dual(program: Program, extra_undefined: set | None = None) -> dict:
    """Dual rules keyed by the indicator of their (negated) head atom.  Helper
    predicates of facts are present with no clauses, so their negation fails.

    The entry clause for ``p`` conjoins the negations of each clause helper;
    every helper clause negates one body goal after asserting the preceding
    ones, so the alternatives partition the failure space."""
    by_pred: dict = defaultdict(list)
    for r in program.rules:
        if r.head is not None:
            by_pred[r.head.key].append(r)
    undefined = set(extra_undefined or ())
    for r in program.rules:
        for lit in iter_literals(r.body):
            if lit.key not in by_pred:
                undefined.add(lit.key)

    duals: dict = {}
    for key, clauses in by_pred.items():
        if any(isinstance(g, Forall) for r in clauses for g in r.body):
            continue
        name, arity = key
        xs = [fresh_var("D") for _ in range(arity)]
        entry_body = []
        out: list[Rule] = []
        for i, rule in enumerate(clauses, start=1):
            hname = helper_name(name, i)
            entry_body.append(Lit(_atom(hname, xs), True))
            head_vars = list(rule.head.atom.args) if arity else []
            local = [v for v in goal_vars_list(rule.body) if v not in head_vars]
            alts = _disjoint_negation(rule.body)
            if local:
                inner_name = helper_name(name, i, local=True)
                inner_atom = _atom(inner_name, head_vars + local)
                goal: Goal = Lit(inner_atom, True)
                for v in reversed(local):
                    goal = Forall(v, goal)
                out.append(Rule(Lit(_atom(hname, head_vars), True), (goal,)))
                for body in alts:
                    out.append(Rule(Lit(inner_atom, True), tuple(body)))
            else:
                for body in alts:
                    out.append(Rule(Lit(_atom(hname, head_vars), True), tuple(body)))
        duals[key] = [Rule(Lit(_atom(name, xs), True), tuple(entry_body))]
        for i in range(1, len(clauses) + 1):
            duals.setdefault((helper_name(name, i), arity), [])
        for r in out:
            duals.setdefault(r.head.key, []).append(r)
    for key in undefined:
        if key in by_pred or key in duals:
            continue
        name, arity = key
        xs = [fresh_var("D") for _ in range(arity)]
        duals[key] = [Rule(Lit(_atom(name, xs), True), ())]
    return duals


def goal_vars_list(goals) -> list[Var]:
    acc: dict = {}
    for g in goals:
        goal_vars(g, acc)
    return list(acc)


def _disjoint_negation(body) -> list[list[Goal]]:
    alts = []
    for j, g in enumerate(body):
        for neg in negate_goal(g):
            alts.append(list(body[:j]) + [neg])
    return alts


# ---------------------------------------------------------------- dependency graph


@dataclass
class DepGraph:
    nodes: set = field(default_factory=set)
    edges: list = field(default_factory=list)  # (src, dst, parity)

    def successors(self, node):
        return [(d, p) for s, d, p in self.edges if s == node]

    def path_parities(self) -> dict:
        """``(a, b) -> set of parities`` of non-empty paths from a to b."""
        reach: dict = defaultdict(set)
        for s, d, p in self.edges:
            reach[(s, d)].add(p)
        changed = True
        while changed:
            changed = False
            for (a, b), ps in list(reach.items()):
                for d, p in self.successors(b):
                    tgt = reach[(a, d)]
                    for q in list(ps):
                        r = (q + p) % 2
                        if r not in tgt:
                            tgt.add(r)
                            changed = True
        return dict(reach)


def build_dep_graph(program: Program) -> DepGraph:
    g = DepGraph()
    for r in program.rules:
        if r.head is None:
            continue
        g.nodes.add(r.head.key)
        for lit in iter_literals(r.body):
            g.nodes.add(lit.key)
            g.edges.append((r.head.key, lit.key, 1 if lit.negated else 0))
    return g


def odd_loop_rules(program: Program, graph: DepGraph | None = None) -> list[Rule]:
    """Rules through which the head depends on itself across an odd number of
    negations.  Predicate-level analysis, so it may flag extra rules."""
    graph = graph or build_dep_graph(program)
    reach = graph.path_parities()
    flagged = []
    for r in program.rules:
        if r.head is None:
            continue
        h = r.head.key
        for lit in iter_literals(r.body):
            e = 1 if lit.negated else 0
            back = set(reach.get((lit.key, h), set()))
            if lit.key == h:
                back.add(0)
            if any((e + p) % 2 == 1 for p in back):
                flagged.append(r)
                break
    return flagged


def consistency_denials(program: Program) -> list[Rule]:
    """``:- p(X), -p(X)`` for every classically negated predicate."""
    out = []
    seen = set()
    for r in program.rules:
        if r.head is None or not r.head.classical or r.head.key in seen:
            continue
        seen.add(r.head.key)
        name, arity = r.head.key
        xs = [fresh_var("C") for _ in range(arity)]
        pos = Lit(_atom(name[1:], xs))
        neg = Lit(_atom(name, xs))
        cand = [Rule(None, (pos, neg)), Rule(None, (neg, pos))]
        if any(rules_variant(c, d) for c in cand for d in program.rules if d.head is None):
            continue
        out.append(cand[0])
    return out


def generate_nmr_check(program: Program, graph: DepGraph | None = None) -> tuple[list[Rule], Optional[Lit]]:
    """Check rules and the entry goal that every candidate answer must pass."""
    rules: list[Rule] = []
    checks: list[Lit] = []
    denials = [r for r in program.rules if r.head is None] + consistency_denials(program)
    n = 0
    for d in denials:
        n += 1
        zs = goal_vars_list(d.body)
        den = _atom(f"{HIDDEN_PREFIX}den_{n}", zs)
        rules.append(Rule(Lit(den), d.body, d.line))
        goal: Goal = Lit(den, True)
        for v in reversed(zs):
            goal = Forall(v, goal)
        chk = Lit(Const(f"{HIDDEN_PREFIX}chk_{n}"))
        rules.append(Rule(chk, (goal,)))
        checks.append(chk)
    for r in odd_loop_rules(program, graph):
        n += 1
        zs = goal_vars_list([r.head] + list(r.body))
        rb = _atom(f"{HIDDEN_PREFIX}rb_{n}", zs)
        chkx = _atom(f"{HIDDEN_PREFIX}chkx_{n}", zs)
        rules.append(Rule(Lit(rb), r.body, r.line))
        rules.append(Rule(Lit(chkx), (Lit(rb, True),)))
        rules.append(Rule(Lit(chkx), (r.head,)))
        goal = Lit(chkx)
        for v in reversed(zs):
            goal = Forall(v, goal)
        chk = Lit(Const(f"{HIDDEN_PREFIX}chk_{n}"))
        rules.append(Rule(chk, (goal,)))
        checks.append(chk)
    if not checks:
        return rules, None
    rules.append(Rule(NMR_GOAL, tuple(checks)))
    return rules, NMR_GOAL


# ---------------------------------------------------------------- compiled form


@dataclass
class CompiledProgram:
    rules: dict  # key -> list[Rule] (positive definitions)
    duals: dict  # key -> list[Rule] (heads are default-negated)
    nmr_goal: Optional[Lit]
    shows: list
    source: Program

    def all_rules(self) -> list[Rule]:
        out = []
        for rs in self.rules.values():
            out.extend(rs)
        return out

    def dump(self) -> str:
        lines = ["% program"]
        for rs in self.rules.values():
            lines.extend(str(r) for r in rs)
        lines.append("% dual")
        for rs in self.duals.values():
            lines.extend(str(r) for r in rs)
        if self.nmr_goal is not None:
            lines.append(f"% entry check: {self.nmr_goal}")
        return "\n".join(lines)


def compile_program(program: Program) -> CompiledProgram:
    """Normalize, expand abducibles, synthesize duals and the NMR check."""
    prog = expand_abducibles(normalize(program))
    graph = build_dep_graph(prog)
    nmr_rules, nmr_goal = generate_nmr_check(prog, graph)
    positive = Program(rules=[r for r in prog.rules if r.head is not None] + nmr_rules, shows=prog.shows)
    rules: dict = defaultdict(list)
    for r in positive.rules:
        rules[r.head.key].append(r)
    duals = synthesize_dual(positive)
    return CompiledProgram(dict(rules), duals, nmr_goal, list(prog.shows), prog)
