"""Constructive representations: programmable witnesses for the reset and
standard automata, the reference products, the positive-tight compiler,
the T_n embedding, a bounded cascade decomposition engine and the
program-level pipeline built on top of it.

Every builder finishes by running :func:`verify_certificate`; a failure there
is a bug and raises instead of returning an unverified result.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from .automata import (
    SIGMA0,
    SIGMA1,
    SIGMA2,
    Automaton,
    MorphismPair,
    MorphismReport,
    Subautomaton,
    characteristic_automaton,
    check_morphism,
    full_transformation_automaton,
    reset_automaton,
    standard_automaton,
)
from .cascade import CascadeSpec, FeedTable, ProgramProduct, product_automaton, product_char_automaton
from .errors import BudgetExceeded, CapExceeded, PreconditionError
from .program import Program, answer_sets, classify, parse_program, reset_program, standard_program, tn_program
from .represent import (
    Certificate,
    RepresentationReport,
    answer_sets_via_product,
    certificate_from_map,
    search_homomorphism,
    verify_certificate,
)

DEFAULT_MAX_FACTORS = 3
DEFAULT_PIPELINE_ATOMS = 2
DEFAULT_TN_MAX = 3
DEFAULT_MAX_TABLES = 2_000_000


# programmable automata


@dataclass
class ProgrammabilityWitness:
    program: Program
    selection: Subautomaton
    h: MorphismPair
    target: Automaton
    report: MorphismReport


def reset_letters(R: Program) -> dict:
    """Reset-automaton letter -> letter of the reset program (inverse of h_R on inputs)."""
    return {SIGMA0: R.interp("1"), SIGMA1: R.interp()}


def reset_states(R: Program) -> dict:
    return {1: R.interp(), 2: R.interp("1")}


def standard_letters(S: Program) -> dict:
    return {SIGMA0: S.interp("2", "3"), SIGMA1: S.interp("1", "3"), SIGMA2: S.interp("1", "2")}


def standard_states(S: Program, n: int) -> dict:
    return {i: S.interp(str(i)) for i in range(1, n + 1)}


def programmable_witness(kind: str, n: Optional[int] = None) -> ProgrammabilityWitness:
    """The isomorphisms showing R programs the reset automaton and S_n the n-state standard one."""
    if kind == "reset":
        P = reset_program()
        target = reset_automaton()
        states, letters = reset_states(P), reset_letters(P)
    elif kind == "standard":
        if n is None or n <= 1:
            raise ValueError("standard witness needs n > 1")
        P = standard_program(n)
        target = standard_automaton(n)
        states, letters = standard_states(P, n), standard_letters(P)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    psi_p = characteristic_automaton(P, mode="lazy")
    selection = Subautomaton(psi_p, sorted(states.values()), sorted(letters.values()))
    h = MorphismPair({I: q for q, I in states.items()}, {J: x for x, J in letters.items()})
    report = check_morphism(selection.automaton(), target, h, mode="isomorphism")
    if not report.ok:
        raise AssertionError(f"programmability witness failed: {report.summary()}")
    return ProgrammabilityWitness(P, selection, h, target, report)


# results


@dataclass
class DecompositionResult:
    target: Automaton
    spec: object  # CascadeSpec or ProgramProduct
    certificate: Optional[Certificate]
    status: str  # "verified" | "inconclusive"
    report: Optional[RepresentationReport] = None
    answer_sets: Optional[list] = None
    notes: list = field(default_factory=list)

    @property
    def factor_census(self) -> dict:
        if self.spec is None:
            return {}
        if isinstance(self.spec, ProgramProduct):
            names = [_program_kind(P) for P in self.spec.factors]
        else:
            names = [a.name for a in self.spec.factors]
        return dict(sorted(Counter(names).items()))

    @property
    def verified(self) -> bool:
        return self.status == "verified"


def _program_kind(P: Program) -> str:
    if P == reset_program():
        return "reset"
    for n in range(2, 17):
        if P == standard_program(n):
            return f"standard{n}"
    return "program"


def _finish(target, spec, cert, claim, notes=()):
    report = verify_certificate(spec, target, cert, claim)
    if not report:
        raise AssertionError(f"builder produced an unverifiable certificate: {report.summary()}")
    return DecompositionResult(target, spec, cert, "verified", report, notes=list(notes))


# reference products


def binary_encoding_certificate(P: Program, pp: ProgramProduct, atoms) -> Certificate:
    """Diagonal certificate sending ``(I_1..I_k)`` to ``{atoms[i] : I_i = {1}}``, identity on inputs."""
    states = list(pp.states)
    h1 = [P.interp(*(a for a, I in zip(atoms, s) if I)) for s in states]
    return Certificate(
        sub_states=states,
        sub_inputs=list(pp.global_inputs),
        partition=[(i,) for i in range(len(states))],
        h1=h1,
        h2=list(pp.global_inputs),
        claim="isomorphic",
    )


def _table(position, pp_factors, inputs, fn):
    spaces = [P.interpretations() for P in pp_factors[:position]]
    return FeedTable.tabulate(position, spaces, inputs, fn)


def worked_example(name: str):
    """``(P, product, certificate)`` for the reference products A, B, C and C'.

    Their feedforward tables are hand-written formulas rather than compiler
    output, so tests can hold the compiler against them.
    """
    R = reset_program()
    one, empty = R.interp("1"), R.interp()
    if name == "A":
        P = parse_program("a.")
        inputs = P.interpretations()
        psi = [_table(0, [R], inputs, lambda pre, J: empty)]
        atoms = ["a"]
    elif name == "B":
        P = parse_program("a :- not b.\nb :- not a.")
        inputs = P.interpretations()
        a, b = P.interp("a"), P.interp("b")
        psi = [
            _table(0, [R, R], inputs, lambda pre, J: one if J & b else empty),
            _table(1, [R, R], inputs, lambda pre, J: one if J & a else empty),
        ]
        atoms = ["a", "b"]
    elif name in ("C", "C'"):
        P = parse_program("a.\nb :- a.\nc :- a, b." if name == "C" else "a.\nb :- a.\nc :- a.\nc :- b.")
        inputs = P.interpretations()
        combine = (lambda x, y: x & y) if name == "C" else (lambda x, y: x | y)
        psi = [
            _table(0, [R] * 3, inputs, lambda pre, J: empty),
            _table(1, [R] * 3, inputs, lambda pre, J: one & ~pre[0]),
            _table(2, [R] * 3, inputs, lambda pre, J: one & ~combine(pre[0], pre[1])),
        ]
        atoms = ["a", "b", "c"]
    else:
        raise ValueError(f"unknown example {name!r}")
    pp = ProgramProduct(tuple([R] * len(atoms)), inputs, tuple(psi), input_program=P)
    return P, pp, binary_encoding_certificate(P, pp, atoms)


# positive tight programs


def compile_positive_tight(P: Program, *, with_answer_sets: bool = True) -> DecompositionResult:
    """One reset factor per atom, ordered by level, feeding ``{}`` exactly when the atom must become true."""
    cls = classify(P)
    if not cls.positive:
        raise PreconditionError("program is not positive")
    if not cls.tight:
        raise PreconditionError("program is not tight")
    order = sorted(P.alphabet, key=lambda a: (cls.levels[a], P.alphabet.index(a)))
    R = reset_program()
    one, empty = R.interp("1"), R.interp()
    bodies = {a: [r.pos for r in P.rules if r.head == a] for a in order}
    inputs = P.interpretations()
    factors = tuple([R] * len(order))

    def component(i):
        atom = order[i]

        def fn(prefix, J):
            derived = {order[j] for j, I in enumerate(prefix) if I}
            return empty if any(body <= derived for body in bodies[atom]) else one

        return _table(i, factors, inputs, fn)

    pp = ProgramProduct(factors, inputs, tuple(component(i) for i in range(len(order))), input_program=P)
    cert = binary_encoding_certificate(P, pp, order)
    target = characteristic_automaton(P, mode="lazy")
    result = _finish(target, pp, cert, "isomorphic", notes=[f"factor order: {', '.join(order)}"])
    if with_answer_sets:
        result.answer_sets = answer_sets_via_product(P, pp, cert, verify=False)
    return result


# T_n embedding


@dataclass
class EmbeddingResult:
    product: ProgramProduct
    h: MorphismPair
    report: MorphismReport
    source: Automaton


def build_tn_embedding(n: int, max_n: int = DEFAULT_TN_MAX) -> EmbeddingResult:
    """Embed the full transformation automaton on [n] into the single-factor product of T_n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > max_n:
        raise BudgetExceeded(f"n = {n} exceeds the evaluation budget {max_n}")
    T = tn_program(n)
    source = full_transformation_automaton(n)
    pp = ProgramProduct((T,), T.interpretations(), (lambda prefix, J: J,), input_program=T)
    target = product_char_automaton(pp, mode="lazy")
    h1 = {j: (T.interp(str(j)),) for j in source.states}
    h2 = {x: T.full & ~T.interp(str(k)) for k, x in enumerate(source.inputs, start=1)}
    h = MorphismPair(h1, h2)
    report = check_morphism(source, target, h, mode="embedding")
    if not report.ok:
        raise AssertionError(f"T_{n} embedding failed: {report.summary()}")
    return EmbeddingResult(pp, h, report, source)


# bounded cascade decomposition


def _distinct_letters(a: Automaton, letters=None) -> list:
    """First letter of each distinct transformation, in alphabet order."""
    seen = {}
    table = a.table()
    for j, x in enumerate(a.inputs):
        if letters is not None and x not in letters:
            continue
        key = tuple(row[j] for row in table)
        seen.setdefault(key, j)
    return sorted(seen.values())


class _Factor:
    """Index-level view of a factor automaton used by the enumeration loop."""

    def __init__(self, automaton: Automaton, letters=None):
        self.automaton = automaton
        self.table = automaton.table()
        self.size = len(self.table)
        self.letters = _distinct_letters(automaton, letters)


def _enumerate_products(factors, n_inputs, *, max_tables):
    """Yield ``(tables, rows)`` for every feedforward assignment, lexicographically.

    ``tables[i][d]`` is a letter index of factor ``i`` for domain entry
    ``d = prefix_index * n_inputs + x``; ``rows`` is the product's index table.
    """
    k = len(factors)
    sizes = [f.size for f in factors]
    domains = []
    span = 1
    for i in range(k):
        domains.append(span * n_inputs)
        span *= sizes[i]
    n_states = span
    states = list(itertools.product(*[range(s) for s in sizes]))
    prefix_idx = []
    for s in states:
        idx, acc = [], 0
        for i in range(k):
            idx.append(acc)
            acc = acc * sizes[i] + s[i]
        prefix_idx.append(idx)
    count = 0
    per_component = [itertools.product(f.letters, repeat=d) for f, d in zip(factors, domains)]
    for tables in itertools.product(*[list(c) for c in per_component]):
        count += 1
        if count > max_tables:
            raise BudgetExceeded(f"more than {max_tables} feedforward tables")
        rows = []
        for si, s in enumerate(states):
            pidx = prefix_idx[si]
            row = []
            for x in range(n_inputs):
                nxt = 0
                for i in range(k):
                    letter = tables[i][pidx[i] * n_inputs + x]
                    nxt = nxt * sizes[i] + factors[i].table[s[i]][letter]
                row.append(nxt)
            rows.append(row)
        yield tables, rows, n_states


def _kinds_for(n_states: int):
    return ["reset"] + [f"standard{m}" for m in range(2, n_states + 1)]


def _factor_automaton(kind: str) -> Automaton:
    if kind == "reset":
        return reset_automaton()
    return standard_automaton(int(kind[len("standard"):]))


def _sequences(kinds, max_factors, n_target, size_of):
    for k in range(1, max_factors + 1):
        for seq in itertools.product(kinds, repeat=k):
            total = 1
            for kind in seq:
                total *= size_of(kind)
            if total >= n_target:
                yield seq


def _search_cascade(factors, target, *, max_tables, max_nodes, max_states):
    """First feedforward assignment whose product homomorphically represents ``target``."""
    n_in = len(target.inputs)
    trows = target.table()
    identity = list(range(n_in))
    total = 1
    for f in factors:
        total *= f.size
    if total > max_states:
        return None
    for tables, rows, n_states in _enumerate_products(factors, n_in, max_tables=max_tables):
        found = search_homomorphism(rows, len(trows), trows, identity, max_nodes=max_nodes)
        if found is not None:
            return tables, found
    return None


def decompose_automaton(
    a: Automaton,
    *,
    max_factors: int = DEFAULT_MAX_FACTORS,
    max_states: int = 1024,
    kinds=None,
    max_tables: int = DEFAULT_MAX_TABLES,
    max_nodes: int = 200_000,
) -> DecompositionResult:
    """Iterative-deepening search for a cascade of reset and standard automata representing ``a``.

    Shorter sequences come first, and within a length the sequences are in
    lexicographic order of ``kinds`` (reset first).  The global alphabet is
    ``a``'s own and letters map identically.  Running out of bounds yields an
    ``inconclusive`` result, which says nothing about existence.
    """
    if len(a.states) < 2:
        raise ValueError("decomposition needs an automaton with more than one state")
    kinds = list(kinds or _kinds_for(len(a.states)))
    target = a.explicit()
    pool = {kind: _Factor(_factor_automaton(kind)) for kind in kinds}
    notes = []
    for seq in _sequences(kinds, max_factors, len(target.states), lambda k: pool[k].size):
        factors = [pool[k] for k in seq]
        try:
            hit = _search_cascade(factors, target, max_tables=max_tables, max_nodes=max_nodes, max_states=max_states)
        except BudgetExceeded as exc:
            notes.append(f"{'x'.join(seq)}: {exc}")
            continue
        if hit is None:
            continue
        tables, found = hit
        spec = _cascade_from_tables(factors, target, tables)
        prod = product_automaton(spec, cap=max_states)
        hmap = {prod.states[q]: target.states[v] for q, v in found.items()}
        cert = certificate_from_map(prod, target, hmap, target.inputs, target.inputs, "homomorphic")
        return _finish(target, spec, cert, "homomorphic", notes)
    notes.append(f"no cascade of at most {max_factors} factors from {kinds} found")
    return DecompositionResult(target, None, None, "inconclusive", notes=notes)


def _cascade_from_tables(factors, target, tables) -> CascadeSpec:
    n_in = len(target.inputs)
    psi = []
    for i, f in enumerate(factors):
        entries = {}
        prefixes = itertools.product(*[g.automaton.states for g in factors[:i]])
        for p_idx, prefix in enumerate(prefixes):
            for x_idx, x in enumerate(target.inputs):
                entries[prefix, x] = f.automaton.inputs[tables[i][p_idx * n_in + x_idx]]
        psi.append(FeedTable(i, entries))
    return CascadeSpec(tuple(f.automaton for f in factors), target.inputs, tuple(psi))


# program-level pipeline


def _transport(spec: CascadeSpec, P: Program):
    """Replace reset/standard automata by R/S_n and move tables through the witnesses' inverses."""
    programs, state_maps, letter_maps = [], [], []
    for a in spec.factors:
        if a.name == "reset":
            Q = reset_program()
            state_maps.append(reset_states(Q))
            letter_maps.append(reset_letters(Q))
        else:
            n = len(a.states)
            Q = standard_program(n)
            state_maps.append(standard_states(Q, n))
            letter_maps.append(standard_letters(Q))
        programs.append(Q)
    back = [{I: q for q, I in m.items()} for m in state_maps]

    def component(i):
        default = letter_maps[i][SIGMA0]

        def fn(prefix, J):
            try:
                qs = tuple(back[j][I] for j, I in enumerate(prefix))
            except KeyError:
                # outside the programmable subautomaton; never reached from the certificate's states
                return default
            return letter_maps[i][spec.psi[i](qs, J)]

        return _table(i, programs, P.interpretations(), fn)

    pp = ProgramProduct(tuple(programs), P.interpretations(), tuple(component(i) for i in range(len(programs))), input_program=P)
    return pp, state_maps


def _search_program_product(P, target, kinds, *, max_factors, max_tables, max_nodes, max_states):
    """Search cascades of R / S_n programs directly, over their full letter sets."""
    progs = {"reset": reset_program()}
    for kind in kinds:
        if kind.startswith("standard"):
            progs[kind] = standard_program(int(kind[len("standard"):]))
    pool = {k: _Factor(characteristic_automaton(Q, mode="explicit")) for k, Q in progs.items()}
    for seq in _sequences(kinds, max_factors, len(target.states), lambda k: pool[k].size):
        factors = [pool[k] for k in seq]
        try:
            hit = _search_cascade(factors, target, max_tables=max_tables, max_nodes=max_nodes, max_states=max_states)
        except BudgetExceeded:
            continue
        if hit is None:
            continue
        tables, found = hit
        programs = tuple(progs[k] for k in seq)
        n_in = len(target.inputs)
        psi = []
        for i in range(len(programs)):
            entries = {}
            prefixes = itertools.product(*[Q.interpretations() for Q in programs[:i]])
            for p_idx, prefix in enumerate(prefixes):
                for x_idx, x in enumerate(target.inputs):
                    entries[prefix, x] = tables[i][p_idx * n_in + x_idx]
            psi.append(FeedTable(i, entries))
        pp = ProgramProduct(programs, P.interpretations(), tuple(psi), input_program=P)
        prod = product_char_automaton(pp, cap=max_states)
        hmap = {prod.states[q]: target.states[v] for q, v in found.items()}
        return pp, certificate_from_map(prod, target, hmap, target.inputs, target.inputs, "homomorphic")
    return None


def kr_pipeline(
    P: Program,
    *,
    max_atoms: int = DEFAULT_PIPELINE_ATOMS,
    max_factors: int = DEFAULT_MAX_FACTORS,
    max_tables: int = DEFAULT_MAX_TABLES,
    max_nodes: int = 200_000,
    program_search: bool = True,
) -> DecompositionResult:
    """Represent P by a cascade of reset and 2^m-standard programs.

    First decompose the characteristic automaton into reset and standard
    automata and transport the result to programs.  When that search is
    inconclusive and ``program_search`` is set, search products of R and
    S_{2^m} over all their letters instead: the standard programs have
    letters (e.g. the full alphabet, sending everything to the empty
    interpretation) that the standard automata lack.
    """
    m = P.width
    if m > max_atoms:
        raise CapExceeded(f"program has {m} atoms, pipeline budget is {max_atoms}")
    n = 2 ** m
    kinds = ["reset", f"standard{n}"]
    target = characteristic_automaton(P, mode="explicit", cap=max_atoms)
    auto = decompose_automaton(target, max_factors=max_factors, kinds=kinds, max_tables=max_tables, max_nodes=max_nodes)
    notes = list(auto.notes)
    if auto.verified:
        pp, state_maps = _transport(auto.spec, P)
        c = auto.certificate
        sub_states = [tuple(state_maps[i][q] for i, q in enumerate(s)) for s in c.sub_states]
        cert = Certificate(sub_states, c.sub_inputs, c.partition, c.h1, c.h2, "homomorphic")
        notes.append("automaton-level decomposition transported to programs")
    elif program_search:
        hit = _search_program_product(
            P, target, kinds, max_factors=max_factors, max_tables=max_tables, max_nodes=max_nodes, max_states=1024
        )
        if hit is None:
            notes.append("program-level search exhausted")
            return DecompositionResult(target, None, None, "inconclusive", notes=notes)
        pp, cert = hit
        notes.append("found by program-level search over full factor alphabets")
    else:
        return DecompositionResult(target, None, None, "inconclusive", notes=notes)
    result = _finish(target, pp, cert, "homomorphic", notes)
    if len(set(cert.h1)) == len(cert.h1) and list(cert.h2) == list(cert.sub_inputs) and set(cert.sub_inputs) == set(P.interpretations()):
        result.answer_sets = answer_sets_via_product(P, pp, cert, verify=False)
        if result.answer_sets != answer_sets(P):
            raise AssertionError("answer sets through the product disagree with direct enumeration")
    return result
