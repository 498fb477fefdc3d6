"""Certificates that a product represents a target automaton, their exhaustive
verification, a bounded search for them, and answer sets read off a
representing product.

A certificate is a closed selection of the product's states and letters, a
congruence on the selected states, and a pair of maps from the quotient onto
the target.  Verification re-derives everything from the product's transition
function and trusts nothing stored in the certificate.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from .automata import Automaton, MorphismPair, Partition, check_morphism, congruence_violation, quotient_by
from .cascade import DEFAULT_PRODUCT_CAP, ProgramProduct, as_automaton
from .errors import BudgetExceeded, PreconditionError
from .program import Program

CLAIMS = ("homomorphic", "isomorphic")
DEFAULT_SEARCH_STATES = 1024
DEFAULT_SEARCH_NODES = 200_000


@dataclass(frozen=True)
class Certificate:
    """Witness that ``target`` is in HS (or IS) of the product.

    ``partition`` holds blocks of indices into ``sub_states``; ``h1[b]`` is the
    target state of block ``b`` and ``h2[j]`` the target letter of
    ``sub_inputs[j]``.
    """

    sub_states: tuple
    sub_inputs: tuple
    partition: tuple
    h1: tuple
    h2: tuple
    claim: str = "homomorphic"

    def __post_init__(self):
        if self.claim not in CLAIMS:
            raise ValueError(f"claim must be one of {CLAIMS}")
        for name in ("sub_states", "sub_inputs", "h1", "h2"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        object.__setattr__(self, "partition", tuple(tuple(b) for b in self.partition))

    def state_map(self) -> dict:
        """Product state -> target state, through the blocks."""
        return {self.sub_states[i]: self.h1[b] for b, block in enumerate(self.partition) for i in block}

    def input_map(self) -> dict:
        return dict(zip(self.sub_inputs, self.h2))

    @property
    def is_diagonal(self) -> bool:
        return all(len(b) == 1 for b in self.partition)


@dataclass
class RepresentationReport:
    verdict: bool
    claim: str
    stage: str = "ok"
    message: str = ""
    violations: list = field(default_factory=list)
    states_checked: int = 0
    inputs_checked: int = 0
    equations_checked: int = 0

    def __bool__(self):
        return self.verdict

    def summary(self) -> str:
        if self.verdict:
            return f"verified: {self.claim}"
        return f"FAILED ({self.stage}): {self.message}"


def _fail(report, stage, message, violations=()):
    report.verdict = False
    report.stage = stage
    report.message = message
    report.violations = list(violations)
    return report


def verify_certificate(product, target: Automaton, cert: Certificate, claim: Optional[str] = None) -> RepresentationReport:
    """Exhaustively re-check every part of ``cert``.

    Order: structure, subautomaton closure, congruence, quotient, morphism
    equations over the whole quotient, and bijectivity for isomorphic claims.
    """
    claim = claim or cert.claim
    report = RepresentationReport(verdict=True, claim=claim)
    if claim not in CLAIMS:
        return _fail(report, "structure", f"unknown claim {claim!r}")
    a = as_automaton(product)

    # structure
    if not cert.sub_states or not cert.sub_inputs:
        return _fail(report, "structure", "empty state or input selection")
    if len(set(cert.sub_states)) != len(cert.sub_states) or len(set(cert.sub_inputs)) != len(cert.sub_inputs):
        return _fail(report, "structure", "selection lists repeat an element")
    bad = [q for q in cert.sub_states if not a.has_state(q)]
    if bad:
        return _fail(report, "structure", f"{bad[0]!r} is not a product state")
    bad = [x for x in cert.sub_inputs if not a.has_input(x)]
    if bad:
        return _fail(report, "structure", f"{bad[0]!r} is not a product input")
    n = len(cert.sub_states)
    flat = sorted(i for b in cert.partition for i in b)
    if flat != list(range(n)) or any(not b for b in cert.partition):
        return _fail(report, "structure", "partition does not exactly cover the selected states")
    if len(cert.h1) != len(cert.partition):
        return _fail(report, "structure", f"h1 has {len(cert.h1)} entries for {len(cert.partition)} blocks")
    if len(cert.h2) != len(cert.sub_inputs):
        return _fail(report, "structure", f"h2 has {len(cert.h2)} entries for {len(cert.sub_inputs)} inputs")
    bad = [v for v in cert.h1 if not target.has_state(v)]
    if bad:
        return _fail(report, "structure", f"h1 value {bad[0]!r} is not a target state")
    bad = [v for v in cert.h2 if not target.has_input(v)]
    if bad:
        return _fail(report, "structure", f"h2 value {bad[0]!r} is not a target input")

    # closure
    members = set(cert.sub_states)
    escapes = []
    for q in cert.sub_states:
        for x in cert.sub_inputs:
            r = a.step(q, x)
            if r not in members:
                escapes.append((q, x))
    report.states_checked = n
    report.inputs_checked = len(cert.sub_inputs)
    if escapes:
        return _fail(report, "closure", f"{len(escapes)} transitions leave the selection", escapes)
    sub = a.restrict(cert.sub_states, cert.sub_inputs)

    # congruence and quotient
    partition = Partition.of(sub, [[cert.sub_states[i] for i in b] for b in cert.partition])
    witness = congruence_violation(sub, partition)
    if witness is not None:
        q, q2, x = witness
        return _fail(report, "congruence", f"{q!r} ~ {q2!r} but their {x!r}-successors are not related", [(q, x), (q2, x)])
    quotient = quotient_by(sub, partition)

    # morphism equations
    value = {cert.sub_states[i]: v for b, v in zip(cert.partition, cert.h1) for i in b}
    h = MorphismPair({blk: value[blk[0]] for blk in quotient.states}, dict(zip(cert.sub_inputs, cert.h2)))
    mode = "isomorphism" if claim == "isomorphic" else "homomorphism"
    mr = check_morphism(quotient, target, h, mode="homomorphism")
    report.equations_checked = mr.equations
    if mr.problems:
        return _fail(report, "morphism", "; ".join(mr.problems))
    if mr.violations:
        viol = [(blk[0], x) for blk, x, _, _ in mr.violations]
        return _fail(report, "morphism", f"{len(viol)} morphism equations fail", viol)
    if mode == "isomorphism":
        if not partition.is_diagonal:
            return _fail(report, "isomorphism", "isomorphic claim needs the diagonal partition")
        iso = check_morphism(quotient, target, h, mode="isomorphism")
        if not iso.ok:
            return _fail(report, "isomorphism", "; ".join(iso.problems) or "not bijective")
    return report


# search


def _propagate(rows, trows, lm, h, used, q, v, injective, limit):
    """Extend ``h`` with ``q -> v`` and everything that forces; None on conflict."""
    if q in h:
        return (h, used) if h[q] == v else None
    if injective and v in used:
        return None
    h = dict(h)
    used = dict(used)
    h[q] = v
    used[v] = used.get(v, 0) + 1
    todo = [q]
    while todo:
        p = todo.pop()
        hp = h[p]
        row = rows[p]
        for j, x in enumerate(lm):
            r = row[j]
            w = trows[hp][x]
            got = h.get(r)
            if got is None:
                if injective and w in used:
                    return None
                h[r] = w
                used[w] = used.get(w, 0) + 1
                if len(h) > limit:
                    return None
                todo.append(r)
            elif got != w:
                return None
    return h, used


def search_homomorphism(rows, n_target, trows, letter_map, *, injective=False, limit=None, max_nodes=DEFAULT_SEARCH_NODES):
    """Index-level core of the representation search.

    ``rows[q][j]`` is the successor of product state ``q`` under the ``j``-th
    selected letter; ``letter_map[j]`` is the target letter index it maps to.
    Returns ``{product_state: target_state}`` on a closed set of states whose
    image is all of the target, or None.  Seeds are tried in increasing index
    order and each must enlarge the image; every closed surjective
    representation contains such a seed sequence, so the search is complete.
    """
    n = len(rows)
    limit = n if limit is None else limit
    nodes = 0

    def rec(h, used, start):
        nonlocal nodes
        if len(used) == n_target:
            return h
        for q in range(start, n):
            if q in h:
                continue
            for v in range(n_target):
                nodes += 1
                if nodes > max_nodes:
                    raise BudgetExceeded(f"representation search exceeded {max_nodes} nodes")
                ext = _propagate(rows, trows, letter_map, h, used, q, v, injective, limit)
                if ext is None or len(ext[1]) == len(used):
                    continue
                found = rec(ext[0], ext[1], q + 1)
                if found is not None:
                    return found
        return None

    return rec({}, {}, 0)


def certificate_from_map(a: Automaton, target: Automaton, hmap: dict, sub_inputs, h2, claim: str) -> Certificate:
    """Build a kernel certificate from a state map on a closed set of product states."""
    sub_states = tuple(sorted(hmap, key=a.state_index))
    blocks = {}
    for i, q in enumerate(sub_states):
        blocks.setdefault(hmap[q], []).append(i)
    ordered = sorted(blocks.items(), key=lambda kv: kv[1][0])
    return Certificate(
        sub_states=sub_states,
        sub_inputs=tuple(sub_inputs),
        partition=tuple(tuple(b) for _, b in ordered),
        h1=tuple(v for v, _ in ordered),
        h2=tuple(h2),
        claim=claim,
    )


def _identity_letters(a: Automaton, target: Automaton):
    """Pair each target letter with the product letter of the same label."""
    by_label = {a.input_label(x): x for x in a.inputs}
    out = []
    for y in target.inputs:
        x = y if a.has_input(y) else by_label.get(target.input_label(y))
        if x is None:
            return None
        out.append(x)
    return out


def search_representation(
    product,
    target: Automaton,
    claim: str = "homomorphic",
    *,
    input_map: Optional[str] = None,
    max_states: int = DEFAULT_SEARCH_STATES,
    max_nodes: int = DEFAULT_SEARCH_NODES,
) -> Optional[Certificate]:
    """First certificate in canonical order, or None when none exists.

    ``input_map="identity"`` pins every target letter to the product letter of
    the same label.  Otherwise letter selections are injective assignments of
    product letters to target letters, in lexicographic order.
    """
    if claim not in CLAIMS:
        raise ValueError(f"claim must be one of {CLAIMS}")
    a = as_automaton(product, mode="lazy")
    if len(a.states) > max_states:
        raise BudgetExceeded(f"product has {len(a.states)} states, search budget is {max_states}")
    table = a.table(cap=max_states * max(len(a.inputs), 1))
    ttable = target.table()
    nt = len(target.states)
    injective = claim == "isomorphic"
    limit = nt if injective else len(a.states)

    if input_map == "identity":
        pinned = _identity_letters(a, target)
        if pinned is None:
            return None
        choices = [tuple(a.input_index(x) for x in pinned)]
    elif input_map is None:
        choices = itertools.permutations(range(len(a.inputs)), len(target.inputs))
    else:
        raise ValueError("input_map must be None or 'identity'")

    for choice in choices:
        # letters in product order; each maps to the target letter that chose it
        order = sorted(range(len(choice)), key=lambda t: choice[t])
        letters = [choice[t] for t in order]
        letter_map = order
        rows = [[table[q][x] for x in letters] for q in range(len(a.states))]
        found = search_homomorphism(rows, nt, ttable, letter_map, injective=injective, limit=limit, max_nodes=max_nodes)
        if found is None:
            continue
        hmap = {a.states[q]: target.states[v] for q, v in found.items()}
        cert = certificate_from_map(
            a, target, hmap, [a.inputs[x] for x in letters], [target.inputs[t] for t in letter_map], claim
        )
        report = verify_certificate(a, target, cert, claim)
        if not report:
            raise AssertionError(f"search produced an invalid certificate: {report.summary()}")
        return cert
    return None


# answer sets through a representing product


def answer_sets_via_product(P: Program, pp, cert: Certificate, *, verify: bool = True) -> list:
    """Answer sets of P computed on the quotient of the representing product.

    For each I the quotient operator is iterated from the block sent to the
    empty interpretation (the bottom of the transported order) until it is
    stable; I is an answer set iff the fixpoint block maps back to I.
    """
    from .automata import characteristic_automaton

    a = as_automaton(pp)
    target = characteristic_automaton(P, mode="lazy")
    if verify:
        report = verify_certificate(a, target, cert, "homomorphic")
        if not report:
            raise PreconditionError(f"certificate does not verify: {report.summary()}")
    if len(set(cert.h1)) != len(cert.h1):
        raise PreconditionError("h1 is not bijective on blocks")
    if set(cert.h1) != set(P.interpretations()):
        raise PreconditionError("h1 does not reach every interpretation of P")
    letter_of = {}
    for x, y in zip(cert.sub_inputs, cert.h2):
        if a.input_label(x) != P.render_interp(y):
            raise PreconditionError(f"input {a.input_label(x)} is not mapped to itself")
        letter_of[y] = x
    if set(letter_of) != set(P.interpretations()):
        raise PreconditionError("the certificate's inputs do not cover every interpretation of P")

    block_index = {}
    for b, block in enumerate(cert.partition):
        for i in block:
            block_index[cert.sub_states[i]] = b
    value = dict(enumerate(cert.h1))
    rep = {b: cert.sub_states[block[0]] for b, block in enumerate(cert.partition)}
    bottom = cert.h1.index(0)

    result = []
    for I in P.interpretations():
        x = letter_of[I]
        b = bottom
        for _ in range(P.width + 2):
            nxt = block_index[a.step(rep[b], x)]
            if nxt == b:
                break
            b = nxt
        else:
            raise AssertionError("quotient iteration did not stabilize")
        if value[b] == I:
            result.append(I)
    return result

