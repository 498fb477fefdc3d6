import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aspkr.automata import Automaton, characteristic_automaton, elevator_automaton, reset_automaton, standard_automaton
from aspkr.cascade import CascadeSpec, FeedTable, product_char_automaton
from aspkr.decompose import worked_example
from aspkr.errors import PreconditionError
from aspkr.program import answer_sets
from aspkr.represent import Certificate, answer_sets_via_product, search_representation, verify_certificate


def example(name):
    P, pp, cert = worked_example(name)
    return P, pp, cert, characteristic_automaton(P)


@pytest.mark.parametrize("name", ["A", "B", "C", "C'"])
def test_examples_verify_isomorphic(name):
    _, pp, cert, target = example(name)
    report = verify_certificate(pp, target, cert, "isomorphic")
    assert report and report.summary() == "verified: isomorphic"
    assert not report.violations


def test_example_b_checks_every_quotient_equation():
    _, pp, cert, target = example("B")
    assert verify_certificate(pp, target, cert).equations_checked == 16


def test_swapped_encoding_fails_with_counterexample():
    P, pp, cert, target = example("B")
    h1 = list(cert.h1)
    i, j = h1.index(P.interp("a")), h1.index(P.interp("b"))
    h1[i], h1[j] = h1[j], h1[i]
    bad = Certificate(cert.sub_states, cert.sub_inputs, cert.partition, h1, cert.h2, cert.claim)
    report = verify_certificate(pp, target, bad)
    assert not report
    assert report.stage == "morphism"
    assert report.violations


def test_structural_mismatch_reported_first():
    _, pp, cert, target = example("A")
    bad = Certificate(cert.sub_states, cert.sub_inputs, cert.partition, cert.h1, cert.h2[:1], cert.claim)
    assert verify_certificate(pp, target, bad).stage == "structure"


def test_non_closed_selection_fails():
    P, pp, cert, target = example("C")
    keep = [0, 7]
    bad = Certificate([cert.sub_states[i] for i in keep], cert.sub_inputs, [(0,), (1,)], [cert.h1[i] for i in keep], cert.h2, "homomorphic")
    assert verify_certificate(pp, target, bad).stage == "closure"


def test_isomorphic_claim_needs_bijection():
    P, pp, cert, target = example("A")
    merged = Certificate(cert.sub_states, cert.sub_inputs, [(0, 1)], [P.interp("a")], cert.h2, "isomorphic")
    assert not verify_certificate(pp, target, merged)


def test_search_finds_example_a():
    _, pp, _, target = example("A")
    cert = search_representation(pp, target, "isomorphic", input_map="identity")
    assert cert is not None and verify_certificate(pp, target, cert, "isomorphic")


def test_search_returns_identity_for_own_automaton():
    _, pp, _, _ = example("B")
    a = product_char_automaton(pp)
    cert = search_representation(pp, a, "isomorphic", input_map="identity")
    assert cert.is_diagonal
    assert list(cert.h1) == list(cert.sub_states)


def test_single_reset_never_represents_the_elevator():
    r = reset_automaton()
    e = elevator_automaton()
    for letters in itertools.product(r.inputs, repeat=len(e.inputs)):
        psi = FeedTable(0, {((), x): l for x, l in zip(e.inputs, letters)})
        spec = CascadeSpec((r,), e.inputs, (psi,))
        assert search_representation(spec, e) is None


@pytest.mark.parametrize("name, expected", [("A", [{"a"}]), ("B", [{"a"}, {"b"}]), ("C", [{"a", "b", "c"}]), ("C'", [{"a", "b", "c"}])])
def test_answer_sets_via_examples(name, expected):
    P, pp, cert, _ = example(name)
    got = answer_sets_via_product(P, pp, cert)
    assert [set(P.atoms_of(I)) for I in got] == expected
    assert got == answer_sets(P)


def test_answer_sets_via_rejects_non_bijective():
    P, pp, cert, _ = example("A")
    merged = Certificate(cert.sub_states, cert.sub_inputs, [(0, 1)], [P.interp("a")], cert.h2, "homomorphic")
    with pytest.raises(PreconditionError):
        answer_sets_via_product(P, pp, merged)


@pytest.mark.parametrize("name", ["A", "B", "C", "C'"])
def test_quotient_operator_is_monotone_in_transported_order(name):
    """Under a bijective certificate the quotient steps respect the order pulled back from subset inclusion."""
    P, pp, cert, _ = example(name)
    a = product_char_automaton(pp)
    h = cert.state_map()
    inv = {v: q for q, v in h.items()}
    assert sorted(inv) == list(P.interpretations())
    for I, I2 in itertools.product(P.interpretations(), repeat=2):
        if I & ~I2:
            continue
        for J in P.interpretations():
            assert h[a.step(inv[I], J)] & ~h[a.step(inv[I2], J)] == 0
    for J in P.interpretations():
        q, steps = inv[0], 0
        while a.step(q, J) != q:
            q, steps = a.step(q, J), steps + 1
        assert steps <= P.width + 1


FACTORS = [reset_automaton(), standard_automaton(2), standard_automaton(3)]


@st.composite
def fuzz_case(draw):
    k = draw(st.integers(1, 2))
    factors = [draw(st.sampled_from(FACTORS)) for _ in range(k)]
    inputs = ["x", "y"][: draw(st.integers(1, 2))]
    psi = []
    for i, f in enumerate(factors):
        entries = {}
        for prefix in itertools.product(*[g.states for g in factors[:i]]):
            for x in inputs:
                entries[prefix, x] = draw(st.sampled_from(f.inputs))
        psi.append(FeedTable(i, entries))
    spec = CascadeSpec(tuple(factors), inputs, tuple(psi))
    n = draw(st.integers(1, 3))
    delta = {(q, x): draw(st.integers(0, n - 1)) for q in range(n) for x in inputs}
    target = Automaton(range(n), inputs, delta)
    claim = draw(st.sampled_from(["homomorphic", "isomorphic"]))
    identity = draw(st.booleans())
    return spec, target, claim, identity


@settings(max_examples=200, deadline=None)
@given(fuzz_case())
def test_search_outputs_reverify(case):
    spec, target, claim, identity = case
    cert = search_representation(spec, target, claim, input_map="identity" if identity else None)
    if cert is not None:
        assert verify_certificate(spec, target, cert, claim)
