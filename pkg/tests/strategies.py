from __future__ import annotations

from hypothesis import strategies as st

from aspkr.program import Program, Rule

ATOMS = ["a", "b", "c", "d", "e", "f"]


@st.composite
def programs(draw, max_atoms=4, max_rules=8, positive=False):
    n = draw(st.integers(1, max_atoms))
    atoms = ATOMS[:n]
    rules = []
    for _ in range(draw(st.integers(1, max_rules))):
        head = draw(st.sampled_from(atoms))
        pos = draw(st.frozensets(st.sampled_from(atoms), max_size=3))
        neg = frozenset() if positive else draw(st.frozensets(st.sampled_from(atoms), max_size=2))
        rules.append(Rule(head, pos, neg))
    return Program.from_rules(rules, extra_atoms=atoms)


@st.composite
def program_with_pairs(draw, max_atoms=4):
    P = draw(programs(max_atoms=max_atoms))
    mask = st.integers(0, P.full)
    return P, draw(mask), draw(mask), draw(mask), draw(mask)
