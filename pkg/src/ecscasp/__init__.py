"""Goal-directed answer set programming with constraints over the rationals,
plus an Event Calculus library built on it."""

from .dualgen import CompiledProgram, compile_program
from .engine import Answer, Engine, solve, solve_all
from .render import answer_json, answer_text
from .syntax import Program, ScaspSyntaxError, load_program, load_text, parse_program, parse_query

__all__ = [
    "Answer",
    "CompiledProgram",
    "Engine",
    "Program",
    "ScaspSyntaxError",
    "answer_json",
    "answer_text",
    "compile_program",
    "load_program",
    "load_text",
    "parse_program",
    "parse_query",
    "solve",
    "solve_all",
]
