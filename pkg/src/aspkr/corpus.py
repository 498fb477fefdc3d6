"""Seeded generators for test corpora: random programs, positive tight programs
and small automata."""
from __future__ import annotations

import itertools
import random

from .automata import Automaton
from .program import Program, Rule, psi

TWO_STATE_MAPS = {"id": (1, 2), "sw": (2, 1), "c1": (1, 1), "c2": (2, 2)}


def _atoms(n):
    return [f"p{i}" for i in range(1, n + 1)]


def random_program(rng: random.Random, n_atoms: int, n_rules: int, max_body: int = 3, neg_rate: float = 0.4) -> Program:
    atoms = _atoms(n_atoms)
    rules = []
    for _ in range(n_rules):
        head = rng.choice(atoms)
        body = rng.sample(atoms, rng.randint(0, min(max_body, n_atoms)))
        pos = [a for a in body if rng.random() >= neg_rate]
        neg = [a for a in body if a not in pos]
        rules.append(Rule(head, frozenset(pos), frozenset(neg)))
    return Program.from_rules(rules, extra_atoms=atoms)


def random_positive_tight(rng: random.Random, max_atoms: int = 6, max_rules: int = 12) -> Program:
    """Positive bodies only draw from atoms earlier in a shuffled order, so the order is a level mapping."""
    n = rng.randint(1, max_atoms)
    order = _atoms(n)
    rng.shuffle(order)
    rules = []
    for _ in range(rng.randint(1, max_rules)):
        k = rng.randrange(n)
        earlier = order[:k]
        body = rng.sample(earlier, rng.randint(0, min(3, len(earlier))))
        rules.append(Rule(order[k], frozenset(body), frozenset()))
    return Program.from_rules(rules, extra_atoms=order)


def random_corpus(seed: int, count: int, max_atoms: int = 4, max_rules: int = 8) -> list:
    rng = random.Random(seed)
    return [random_program(rng, rng.randint(1, max_atoms), rng.randint(1, max_rules)) for _ in range(count)]


def two_state_automaton(first: str, second: str) -> Automaton:
    """States 1, 2 and letters ``x``, ``y`` acting by the named maps (id, sw, c1, c2)."""
    maps = {"x": TWO_STATE_MAPS[first], "y": TWO_STATE_MAPS[second]}
    delta = {(q, x): m[q - 1] for x, m in maps.items() for q in (1, 2)}
    return Automaton((1, 2), ("x", "y"), delta, name=f"{first}-{second}", parse_state=int)


def two_state_automata() -> list:
    """All 16 automata with two states and two letters."""
    return [two_state_automaton(f, s) for f, s in itertools.product(TWO_STATE_MAPS, repeat=2)]


def flip_automaton() -> Automaton:
    return two_state_automaton("sw", "sw")


def one_atom_programs() -> list:
    """One program per distinct characteristic behavior over the single atom ``a``.

    Rule sets are enumerated by size and then by rule order, so each
    behavior is represented by its smallest program.
    """
    candidates = [
        Rule("a", frozenset(), frozenset()),
        Rule("a", frozenset({"a"}), frozenset()),
        Rule("a", frozenset(), frozenset({"a"})),
        Rule("a", frozenset({"a"}), frozenset({"a"})),
    ]
    seen = {}
    for k in range(1, len(candidates) + 1):
        for rules in itertools.combinations(candidates, k):
            P = Program.from_rules(rules)
            table = tuple(psi(P, I, J) for I in P.interpretations() for J in P.interpretations())
            seen.setdefault(table, P)
    return list(seen.values())
