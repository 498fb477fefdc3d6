import pytest
from hypothesis import given, settings

from aspkr.errors import AlphabetMismatch, ProgramSyntaxError
from aspkr.program import (
    Program,
    Rule,
    answer_sets,
    canonical_program,
    check_level_mapping,
    classify,
    facts_program,
    lfp_psi,
    lfp_trace,
    parse_program,
    psi,
    reset_program,
    standard_program,
    tn_program,
)
from oracles import psi_sets, rules_of, stable_models
from strategies import program_with_pairs, programs

B = "a :- not b.\nb :- not a.\n"


def sets(P, masks):
    return {frozenset(P.atoms_of(m)) for m in masks}


class TestParser:
    def test_rules_and_comments(self):
        P = parse_program("% two choices\na :- not b.  % first\nb :- not a.\n")
        assert P.alphabet == ("a", "b")
        assert len(P.rules) == 2

    def test_alphabet_directive_widens(self):
        P = parse_program("#alphabet a, z.\na.\n")
        assert P.alphabet == ("a", "z")
        assert len(list(P.interpretations())) == 4

    def test_numeric_atoms_sort_numerically(self):
        P = parse_program("10 :- 2.\n2.\n")
        assert P.alphabet == ("2", "10")

    @pytest.mark.parametrize(
        "text, line, column",
        [
            ("a :- not.\n", 1, 6),
            ("a :- b\n", 2, 1),
            ("\n\nA.\n", 3, 1),
            ("a :- b,, c.\n", 1, 8),
        ],
    )
    def test_syntax_errors_carry_position(self, text, line, column):
        with pytest.raises(ProgramSyntaxError) as info:
            parse_program(text)
        assert (info.value.line, info.value.column) == (line, column)

    def test_empty_program_rejected(self):
        with pytest.raises(ProgramSyntaxError):
            parse_program("% nothing here\n")

    def test_duplicate_directive_rejected(self):
        with pytest.raises(ProgramSyntaxError):
            parse_program("#alphabet a.\n#alphabet b.\na.\n")

    @given(programs())
    def test_render_parse_roundtrip(self, P):
        assert parse_program(P.render()) == P

    def test_interpretation_syntax(self):
        P = parse_program("a.\nb :- a.\nc :- a, b.\n")
        assert P.render_interp(P.interp("c", "a")) == "{a,c}"
        assert P.render_interp(0) == "{}"
        assert P.parse_interp("{ c , a }") == P.interp("a", "c")
        with pytest.raises(AlphabetMismatch):
            P.parse_interp("{z}")

    def test_psi_rejects_foreign_masks(self):
        P = parse_program("a.\n")
        with pytest.raises(AlphabetMismatch):
            psi(P, 2, 0)


class TestOperator:
    def test_reset_letters(self):
        R = reset_program()
        one = R.interp("1")
        assert [psi(R, I, J) for I in (0, one) for J in (0, one)] == [one, 0, one, 0]

    def test_example_b_single_transition(self):
        P = parse_program(B)
        assert psi(P, P.interp(), P.interp("a")) == P.interp("a")

    def test_example_c_chain(self):
        P = canonical_program("exampleC")
        assert [P.render_interp(I) for I in lfp_trace(P, 0)] == ["{}", "{a}", "{a,b}", "{a,b,c}"]

    def test_tn_rule_count(self):
        assert len(tn_program(2).rules) == 2 * 4
        assert tn_program(3).width == 27

    @settings(max_examples=200)
    @given(program_with_pairs())
    def test_matches_set_oracle(self, case):
        P, I, J, _, _ = case
        expected = psi_sets(rules_of(P), frozenset(P.atoms_of(I)), frozenset(P.atoms_of(J)))
        assert frozenset(P.atoms_of(psi(P, I, J))) == expected


class TestAnswerSets:
    def test_reference_programs(self):
        assert sets(parse_program(B), answer_sets(parse_program(B))) == {frozenset("a"), frozenset("b")}
        assert answer_sets(reset_program()) == []
        for n in range(2, 7):
            assert answer_sets(standard_program(n)) == [0]
        for kind in ("exampleC", "exampleCprime"):
            P = canonical_program(kind)
            assert sets(P, answer_sets(P)) == {frozenset("abc")}

    def test_facts(self):
        P = facts_program(3)
        assert answer_sets(P) == [P.full]

    @settings(max_examples=200)
    @given(programs(max_atoms=5))
    def test_agrees_with_reduct_oracle(self, P):
        assert sets(P, answer_sets(P)) == set(stable_models(P))


class TestClassify:
    def test_example_c_levels(self):
        c = classify(canonical_program("exampleC"))
        assert c.positive and c.tight
        assert c.levels == {"a": 0, "b": 1, "c": 2}

    def test_positive_cycle_is_not_tight(self):
        c = classify(parse_program("a :- b.\nb :- a.\n"))
        assert c.positive and not c.tight

    def test_negation_is_not_positive(self):
        c = classify(parse_program(B))
        assert not c.positive and c.tight

    @given(programs())
    def test_levels_are_witnesses(self, P):
        c = classify(P)
        if c.tight:
            assert check_level_mapping(P, c.levels)

    def test_rule_validation(self):
        with pytest.raises(ValueError):
            Program(("a",), (Rule("b"),))
        with pytest.raises(ValueError):
            Program(("a",), ())

    def test_lfp_of_positive_ignores_j(self):
        P = canonical_program("exampleCprime")
        assert {lfp_psi(P, J) for J in P.interpretations()} == {P.full}
