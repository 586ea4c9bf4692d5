"""Event Calculus payload: the bundled BEC theory and the narrative scenarios."""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

EXAMPLES_DIR = Path(str(resources.files(__package__) / "examples"))

LIBRARIES = {"bec_theory": "bec_theory.pl"}

EXAMPLES = {
    "light": "light.pl",
    "light-state": "light_state.pl",
    "light-badred": "light_badred.pl",
    "watertap": "watertap.pl",
    "watertap-abducible": "watertap_abducible.pl",
}


def library_path(name: str) -> Optional[Path]:
    """Bundled library file for an ``#include`` name, if any."""
    fname = LIBRARIES.get(name)
    return EXAMPLES_DIR / fname if fname else None


def example_path(name: str) -> Path:
    try:
        return EXAMPLES_DIR / EXAMPLES[name]
    except KeyError:
        raise KeyError(f"unknown example {name!r}; choose from {', '.join(sorted(EXAMPLES))}") from None


@dataclass
class Scenario:
    name: str
    path: Path
    queries: dict = field(default_factory=dict)  # query text -> expected outcome summary

    @property
    def text(self) -> str:
        return self.path.read_text(encoding="utf-8")

    def program(self, *extra_files: Path):
        from .syntax import load_program

        prog = load_program(self.path)
        for f in extra_files:
            prog.extend(load_program(f))
        return prog


def bec_theory():
    from .syntax import load_program

    return load_program(library_path("bec_theory"))


def light_scenario(state_constraint: bool = False) -> Scenario:
    name = "light-state" if state_constraint else "light"
    return Scenario(
        name,
        example_path(name),
        {
            "?- holdsAt(on,3).": "succeeds",
            "?- -holdsAt(on,9/2).": "succeeds",
            "?- not holdsAt(on,1).": "succeeds",
            "?- not -holdsAt(on,1).": "succeeds",
            "?- holdsAt(red,T).": "T #> 2, T #< 3 ; T #> 5, T #< 6",
        },
    )


def water_tap_scenario(abducible: bool = False) -> Scenario:
    if abducible:
        return Scenario(
            "watertap-abducible",
            example_path("watertap-abducible"),
            {"?- holdsAt(level(L),14).": "L = 12 ; L = 0"},
        )
    return Scenario(
        "watertap",
        example_path("watertap"),
        {
            "?- holdsAt(level(H),15/2).": "H = 10/3",
            "?- holdsAt(level(10/3),T).": "T = 15/2",
            "?- holdsAt(level(11),T).": "T = 53/4",
            "?- holdsAt(level(12),14).": "one model with max_level(16)",
        },
    )


def level_uniqueness_path() -> Path:
    return EXAMPLES_DIR / "level_uniqueness.pl"
