import random

import pytest
from hypothesis import given, settings

from aspkr.automata import characteristic_automaton, reset_automaton
from aspkr.cascade import CascadeSpec, ProgramProduct, render_table
from aspkr.corpus import flip_automaton, random_positive_tight
from aspkr.decompose import (
    build_tn_embedding,
    compile_positive_tight,
    decompose_automaton,
    kr_pipeline,
    worked_example,
    programmable_witness,
)
from aspkr.errors import BudgetExceeded, CapExceeded, PreconditionError
from aspkr.program import answer_sets, facts_program, lfp_psi, parse_program
from aspkr.represent import verify_certificate
from strategies import programs


def render_h(w):
    P = w.program
    h1 = {P.render_interp(I): q for I, q in w.h.h1.items()}
    h2 = {P.render_interp(J): x for J, x in w.h.h2.items()}
    return h1, h2


def test_reset_witness_maps():
    w = programmable_witness("reset")
    assert render_h(w) == ({"{}": 1, "{1}": 2}, {"{}": "s1", "{1}": "s0"})
    assert w.report.equations == 4


def test_standard_witness_maps():
    w = programmable_witness("standard", 4)
    h1, h2 = render_h(w)
    assert h2["{1,3}"] == "s1"
    assert sorted(h1) == ["{1}", "{2}", "{3}", "{4}"]
    assert w.report.equations == 12


def test_standard_two_selection_inputs():
    w = programmable_witness("standard", 2)
    assert w.program.alphabet == ("1", "2", "3")
    assert sorted(w.program.render_interp(J) for J in w.selection.inputs) == ["{1,2}", "{1,3}", "{2,3}"]


def test_witness_parameter_checks():
    with pytest.raises(ValueError):
        programmable_witness("standard", 1)
    with pytest.raises(ValueError):
        programmable_witness("cyclic", 3)


@pytest.mark.parametrize("name", ["C", "C'"])
def test_compiler_reproduces_worked_tables(name):
    P, pp, _ = worked_example(name)
    result = compile_positive_tight(P)
    for i in range(3):
        assert render_table(result.spec, i) == render_table(pp, i)
    assert result.report.claim == "isomorphic"


def test_compiler_on_facts():
    P = facts_program(4)
    result = compile_positive_tight(P)
    assert result.factor_census == {"reset": 4}
    for comp in result.spec.psi:
        assert set(comp.entries.values()) == {0}
    assert result.answer_sets == [P.full]


def test_compiler_preconditions():
    with pytest.raises(PreconditionError):
        compile_positive_tight(parse_program("a :- not b.\n"))
    with pytest.raises(PreconditionError):
        compile_positive_tight(parse_program("a :- b.\nb :- a.\n"))


@settings(max_examples=40, deadline=None)
@given(programs(max_atoms=4, positive=True))
def test_compiler_matches_least_model(P):
    from aspkr.program import classify

    if not classify(P).tight:
        return
    result = compile_positive_tight(P)
    assert result.answer_sets == answer_sets(P) == [lfp_psi(P, 0)]


def test_compiler_seeded_corpus():
    rng = random.Random(7)
    for _ in range(10):
        P = random_positive_tight(rng)
        assert compile_positive_tight(P).answer_sets == [lfp_psi(P, 0)]


@pytest.mark.parametrize("n, equations", [(1, 1), (2, 8), (3, 81)])
def test_tn_embedding(n, equations):
    r = build_tn_embedding(n)
    assert r.report.ok and r.report.equations == equations
    assert len(set(r.h.h1.values())) == n
    assert len(set(r.h.h2.values())) == n ** n


def test_tn_budget():
    with pytest.raises(BudgetExceeded):
        build_tn_embedding(4)


def test_reset_decomposes_to_itself():
    r = decompose_automaton(reset_automaton())
    assert r.verified
    spec = r.spec
    assert isinstance(spec, CascadeSpec) and len(spec.factors) == 1
    assert spec.psi[0].entries == {((), "s0"): "s0", ((), "s1"): "s1"}
    assert r.certificate.is_diagonal


def test_flip_uses_one_standard_factor():
    r = decompose_automaton(flip_automaton())
    assert r.factor_census == {"standard2": 1}
    assert set(r.spec.psi[0].entries.values()) <= {"s1", "s2"}


def test_decomposition_is_deterministic():
    a = flip_automaton()
    first, second = decompose_automaton(a), decompose_automaton(a)
    assert first.spec.psi[0].entries == second.spec.psi[0].entries
    assert first.certificate == second.certificate


def test_exhausted_bounds_are_inconclusive():
    from aspkr.automata import elevator_automaton

    r = decompose_automaton(elevator_automaton(), max_factors=1)
    assert r.status == "inconclusive" and r.certificate is None


@pytest.mark.parametrize("text", ["a.\n", "a :- not a.\n", "a :- not b.\nb :- not a.\n"])
def test_pipeline_automaton_route(text):
    P = parse_program(text)
    r = kr_pipeline(P)
    assert r.verified and isinstance(r.spec, ProgramProduct)
    assert verify_certificate(r.spec, characteristic_automaton(P), r.certificate)
    assert r.answer_sets == answer_sets(P)
    assert set(r.factor_census) <= {"reset", f"standard{2 ** P.width}"}


def test_pipeline_standard_factors_stay_in_selection():
    r = kr_pipeline(parse_program("a :- a.\n"))
    S = r.spec.factors[0]
    allowed = {S.interp("2", "3"), S.interp("1", "3"), S.interp("1", "2")}
    assert set(r.spec.psi[0].entries.values()) <= allowed


def test_pipeline_budget():
    with pytest.raises(CapExceeded):
        kr_pipeline(parse_program("a.\nb.\nc.\n"))


def test_pipeline_without_program_search_reports_inconclusive():
    r = kr_pipeline(parse_program("e :- e.\ne :- not e.\n"), max_factors=1, program_search=False)
    assert r.status == "inconclusive"


@pytest.mark.slow
def test_pipeline_elevator_program():
    P = parse_program("e :- e.\ne :- not e.\n")
    r = kr_pipeline(P)
    assert r.verified and r.answer_sets == [] == answer_sets(P)
