"""Answer-set programs, their characteristic automata, and cascade
representations built from reset and standard programs."""
from __future__ import annotations

from .automata import (
    Automaton,
    MorphismPair,
    Partition,
    Subautomaton,
    characteristic_automaton,
    check_morphism,
    quotient_by,
)
from .cascade import CascadeSpec, FeedTable, ProgramProduct, cascade_step, product_automaton, program_product_step
from .decompose import (
    DecompositionResult,
    build_tn_embedding,
    compile_positive_tight,
    decompose_automaton,
    kr_pipeline,
    programmable_witness,
)
from .errors import AspKrError
from .program import Program, Rule, answer_sets, classify, lfp_psi, parse_program, psi
from .represent import Certificate, answer_sets_via_product, search_representation, verify_certificate

__all__ = [
    "AspKrError",
    "Automaton",
    "CascadeSpec",
    "Certificate",
    "DecompositionResult",
    "FeedTable",
    "MorphismPair",
    "Partition",
    "Program",
    "ProgramProduct",
    "Rule",
    "Subautomaton",
    "answer_sets",
    "answer_sets_via_product",
    "build_tn_embedding",
    "cascade_step",
    "characteristic_automaton",
    "check_morphism",
    "classify",
    "compile_positive_tight",
    "decompose_automaton",
    "kr_pipeline",
    "lfp_psi",
    "parse_program",
    "product_automaton",
    "program_product_step",
    "programmable_witness",
    "psi",
    "quotient_by",
    "search_representation",
    "verify_certificate",
]
