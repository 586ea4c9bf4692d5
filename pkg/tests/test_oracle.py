"""Engine answers against brute-force stable models on small ground programs."""

import random

import pytest

from oracle import disagreements, random_program, stable_models

HANDWRITTEN = [
    "p.",
    "p :- q. q.",
    "p :- not q.",
    "p :- not q. q :- not p.",
    "p :- not q. q :- r. r :- not p.",
    "p :- not p.",
    "p :- not q. q :- not p. r :- not r.",
    "p :- not q. q :- not p. r :- not r. r :- p.",
    "p :- p.",
    "p :- q. q :- p.",
    "p :- not q. q :- not r. r :- not p.",
    "a :- not b. b :- not a. :- a.",
    "a :- not b. b :- not a. c :- a. c :- b.",
    "-p. p :- not q.",
    "-p :- not p. p :- not -p.",
    "p :- not -p. -p :- not p. :- p.",
    "a :- not b. b :- not c. c :- not a. d.",
    "a :- not b, not c. b :- not a, not c. c :- not a, not b.",
    "a :- b, not c. b. c :- not a.",
    "x :- not y. y :- not x. z :- x, not w. w :- y.",
    "p(a). q(a) :- p(a), not r(a). r(b).",
    "p :- not q, not r. q :- not p. r :- q.",
    "a :- not b. b :- not a. :- not a.",
    "a :- not a, b.",
    "a :- not a, b. b :- not c. c :- not b.",
]

RANDOM = [random_program(random.Random(seed)) for seed in range(40)]
RANDOM += [random_program(random.Random(1000 + seed), n_atoms=5, n_rules=9) for seed in range(20)]
CORPUS = HANDWRITTEN + RANDOM


@pytest.mark.parametrize("text", CORPUS)
def test_engine_matches_stable_models(text):
    assert disagreements(text) == []


def test_corpus_is_large_enough():
    assert len(CORPUS) >= 30


def test_oracle_itself_on_known_programs():
    assert stable_models("p :- not q. q :- not p.") == [frozenset({"q"}), frozenset({"p"})]
    assert stable_models("p :- not p.") == []
    assert stable_models("-p. p.") == []
    assert stable_models("a :- not b. b :- not a. :- a.") == [frozenset({"b"})]


def test_corpus_exercises_both_outcomes():
    with_models = sum(bool(stable_models(t)) for t in CORPUS)
    assert 0 < with_models < len(CORPUS)
