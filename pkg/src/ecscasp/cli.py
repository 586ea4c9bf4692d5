"""``ecscasp`` command: load programs, run one query, print the answers."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import ec
from .dualgen import compile_program
from .engine import Engine, run_with_big_stack, solve
from .render import answer_records, justification_text, text_from_records
from .syntax import AbducibleError, Program, ScaspSyntaxError, load_program, parse_query

EXIT_OK = 0
EXIT_NO_MODELS = 1
EXIT_ERROR = 2
EXIT_UNKNOWN = 3


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    inputs: list = field(default_factory=list)
    examples: list = field(default_factory=list)
    query: Optional[str] = None
    max_answers: int = 0
    decimals: bool = False
    show_filter: bool = True
    dump_dual: bool = False
    dump_store: bool = False
    justify: bool = False
    depth: Optional[int] = None
    nmr: bool = True
    output: str = "text"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ecscasp",
        description="Goal-directed answer set programming with linear constraints over the rationals.",
    )
    p.add_argument("files", nargs="*", metavar="FILE", help="program files to load")
    p.add_argument(
        "--example",
        action="append",
        default=[],
        metavar="NAME",
        help=f"bundled scenario ({', '.join(sorted(ec.EXAMPLES))})",
    )
    p.add_argument("-q", "--query", help='query text, e.g. "?- holdsAt(on,3)."')
    p.add_argument("-s", type=int, default=0, metavar="N", help="number of answers (0 = all)")
    p.add_argument("-r", action="store_true", help="print rationals as decimals")
    p.add_argument("--json", action="store_true", help="emit one JSON object per answer")
    p.add_argument("--show-all", action="store_true", help="ignore #show directives")
    p.add_argument("--justify", action="store_true", help="print the justification tree")
    p.add_argument("--dump-dual", action="store_true", help="print the compiled program with its dual")
    p.add_argument("--dump-store", action="store_true", help="print the final constraint store per answer")
    p.add_argument("--depth", type=int, default=None, metavar="N", help="bound on derivation depth")
    p.add_argument("--no-nmr", action="store_true", help="skip the global consistency check (debugging)")
    return p


def config_from_args(argv=None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    if ns.s < 0:
        raise UsageError("-s must be non-negative")
    if ns.depth is not None and ns.depth <= 0:
        raise UsageError("--depth must be positive")
    cfg = RunConfig(
        inputs=[Path(f) for f in ns.files],
        examples=list(ns.example),
        query=ns.query,
        max_answers=ns.s,
        decimals=ns.r,
        show_filter=not ns.show_all,
        dump_dual=ns.dump_dual,
        dump_store=ns.dump_store,
        justify=ns.justify,
        depth=ns.depth,
        nmr=not ns.no_nmr,
        output="json" if ns.json else "text",
    )
    if not cfg.inputs and not cfg.examples:
        raise UsageError("no program given: pass FILE arguments or --example NAME")
    if cfg.query is None and not cfg.dump_dual:
        raise UsageError("no query given: use -q")
    return cfg


def load_inputs(cfg: RunConfig) -> Program:
    prog = Program()
    for name in cfg.examples:
        prog.extend(load_program(ec.example_path(name)))
    for path in cfg.inputs:
        prog.extend(load_program(path))
    return prog


def run(cfg: RunConfig, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        program = compile_program(load_inputs(cfg))
        query = parse_query(cfg.query) if cfg.query is not None else None
    except (OSError, KeyError, ScaspSyntaxError, AbducibleError) as e:
        print(f"ecscasp: {_message(e)}", file=err)
        return EXIT_ERROR
    if cfg.dump_dual:
        print(program.dump(), file=out)
        if query is None:
            return EXIT_OK
    shows = program.shows if cfg.show_filter else None
    engine = Engine(program, depth_limit=cfg.depth, nmr=cfg.nmr)

    def go() -> int:
        count = 0
        printed: set = set()
        for ans in solve(program, query, engine=engine):
            rec = answer_records(ans, shows, cfg.decimals)
            # answers differing only in hidden literals look the same once filtered
            view = json.dumps([rec["model"], rec["bindings"], rec["constraints"]])
            if view in printed:
                continue
            printed.add(view)
            count += 1
            if cfg.output == "json":
                print(json.dumps(rec), file=out)
            else:
                if count > 1:
                    print(file=out)
                print(text_from_records(rec), file=out)
                if cfg.justify:
                    print(justification_text(ans, cfg.decimals), file=out)
            if cfg.dump_store:
                print(f"% store: {ans.store}", file=out if cfg.output == "text" else err)
            if cfg.max_answers and count >= cfg.max_answers:
                break
        return count

    count = run_with_big_stack(go)
    for d in dict.fromkeys(engine.stats.diagnostics):
        print(f"ecscasp: {d}", file=err)
    if count:
        return EXIT_OK
    if engine.stats.truncated:
        print("ecscasp: depth bound reached; the search is incomplete", file=err)
        return EXIT_UNKNOWN
    if cfg.output == "text":
        print("no models", file=out)
    return EXIT_NO_MODELS


def _message(e: Exception) -> str:
    if isinstance(e, KeyError):
        return str(e.args[0]) if e.args else "unknown name"
    return str(e)


def main(argv=None) -> int:
    try:
        cfg = config_from_args(argv)
    except UsageError as e:
        print(f"ecscasp: {e}", file=sys.stderr)
        return EXIT_ERROR
    except SystemExit as e:  # argparse already printed its message
        return EXIT_ERROR if e.code else EXIT_OK
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
