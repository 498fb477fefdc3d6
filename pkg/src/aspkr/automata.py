"""Finite automata in the sense of Gecseg: states, an input alphabet and a total
transition map.  No initial or accepting states.

An :class:`Automaton` is either *explicit* (a full transition table checked at
construction) or *lazy* (a transition function evaluated on demand and
memoized).  Lazy mode is what makes characteristic automata of 27-atom
programs usable: only the queried transitions are ever computed.
"""
from __future__ import annotations

import itertools
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

from .errors import BudgetExceeded, CapExceeded, NotACongruence
from .program import Program, _psi

DEFAULT_EXPLICIT_ATOMS_CAP = 6


class TupleSpace(Sequence):
    """Cartesian product of sequences, in lexicographic (row-major) order."""

    def __init__(self, spaces):
        self.spaces = tuple(spaces)
        self._lookups = [_Lookup(s) for s in self.spaces]
        self._sizes = [len(s) for s in self.spaces]

    def __len__(self):
        n = 1
        for s in self._sizes:
            n *= s
        return n

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        if i < 0:
            i += len(self)
        if not 0 <= i < len(self):
            raise IndexError(i)
        out = []
        for space, size in zip(reversed(self.spaces), reversed(self._sizes)):
            i, r = divmod(i, size)
            out.append(space[r])
        return tuple(reversed(out))

    def __iter__(self):
        return itertools.product(*self.spaces)

    def __contains__(self, t):
        return (
            isinstance(t, tuple)
            and len(t) == len(self.spaces)
            and all(c in lk for c, lk in zip(t, self._lookups))
        )

    def index(self, t, *args):
        if t not in self:
            raise ValueError(f"{t!r} is not in the product space")
        i = 0
        for c, lk, size in zip(t, self._lookups, self._sizes):
            i = i * size + lk.index(c)
        return i

    def __eq__(self, other):
        return isinstance(other, TupleSpace) and self.spaces == other.spaces

    def __hash__(self):
        return hash(self.spaces)

    def __repr__(self):
        return f"TupleSpace({list(self.spaces)!r})"


class _Lookup:
    """O(1) membership and position lookup for a sequence of hashables."""

    def __init__(self, seq):
        self.seq = seq
        if isinstance(seq, (range, TupleSpace)):
            self._pos = None
        else:
            self._pos = {}
            for i, item in enumerate(seq):
                if item in self._pos:
                    raise ValueError(f"duplicate element {item!r}")
                self._pos[item] = i

    def __contains__(self, item):
        if self._pos is None:
            try:
                return item in self.seq
            except TypeError:
                return False
        try:
            return item in self._pos
        except TypeError:
            return False

    def index(self, item):
        if self._pos is None:
            return self.seq.index(item)
        try:
            return self._pos[item]
        except (KeyError, TypeError):
            raise ValueError(f"{item!r} is not in the sequence") from None

    def __len__(self):
        return len(self.seq)


class Automaton:
    """``<Q, Sigma, delta>`` with ``delta`` total.

    ``delta`` is a mapping ``{(q, x): q'}`` (explicit mode) or a callable
    ``delta(q, x)`` (lazy mode).  ``state_label``/``input_label`` render
    states and letters for files and DOT output.
    """

    def __init__(
        self,
        states: Sequence,
        inputs: Sequence,
        delta,
        *,
        name: str = "",
        state_label: Callable = str,
        input_label: Callable = str,
        parse_state: Optional[Callable] = None,
        parse_input: Optional[Callable] = None,
    ):
        if len(inputs) == 0:
            raise ValueError("input alphabet must be nonempty")
        self.states = states if isinstance(states, (range, TupleSpace)) else tuple(states)
        self.inputs = inputs if isinstance(inputs, (range, TupleSpace)) else tuple(inputs)
        self.name = name
        self.state_label = state_label
        self.input_label = input_label
        self._parse_state = parse_state
        self._parse_input = parse_input
        self._states = _Lookup(self.states)
        self._inputs = _Lookup(self.inputs)
        self._table_cache = None
        if isinstance(delta, Mapping):
            self.lazy = False
            expected = len(self.states) * len(self.inputs)
            if len(delta) != expected:
                raise ValueError(f"explicit table needs {expected} entries, got {len(delta)}")
            table = {}
            for (q, x), r in delta.items():
                if q not in self._states or x not in self._inputs:
                    raise ValueError(f"table entry ({q!r}, {x!r}) outside Q x Sigma")
                if r not in self._states:
                    raise ValueError(f"delta({q!r}, {x!r}) = {r!r} is not a state")
                table[q, x] = r
            self._delta = table
            self._fn = None
        else:
            self.lazy = True
            self._delta = {}
            self._fn = delta

    def step(self, q, x):
        try:
            return self._delta[q, x]
        except KeyError:
            if self._fn is None:
                raise ValueError(f"({q!r}, {x!r}) is not in Q x Sigma") from None
        if q not in self._states or x not in self._inputs:
            raise ValueError(f"({q!r}, {x!r}) is not in Q x Sigma")
        r = self._fn(q, x)
        if r not in self._states:
            raise ValueError(f"delta({q!r}, {x!r}) = {r!r} is not a state")
        # plain dict assignment: racing threads store identical values
        self._delta[q, x] = r
        return r

    __call__ = step

    @property
    def evaluated(self) -> int:
        """Number of memoized transitions (all of them in explicit mode)."""
        return len(self._delta)

    def has_state(self, q) -> bool:
        return q in self._states

    def has_input(self, x) -> bool:
        return x in self._inputs

    def state_index(self, q) -> int:
        return self._states.index(q)

    def input_index(self, x) -> int:
        return self._inputs.index(x)

    def parse_state(self, label: str):
        if self._parse_state is not None:
            return self._parse_state(label)
        for q in self.states:
            if self.state_label(q) == label:
                return q
        raise ValueError(f"no state labelled {label!r}")

    def parse_input(self, label: str):
        if self._parse_input is not None:
            return self._parse_input(label)
        for x in self.inputs:
            if self.input_label(x) == label:
                return x
        raise ValueError(f"no input labelled {label!r}")

    def table(self, cap: int = 1 << 16) -> tuple:
        """Index table: ``table[i][j]`` is the index of ``delta(states[i], inputs[j])``."""
        if self._table_cache is None:
            if len(self.states) * len(self.inputs) > cap:
                raise CapExceeded(f"{len(self.states)}x{len(self.inputs)} table exceeds cap {cap}")
            si = self._states.index
            self._table_cache = tuple(
                tuple(si(self.step(q, x)) for x in self.inputs) for q in self.states
            )
        return self._table_cache

    def explicit(self, cap: int = 1 << 16) -> "Automaton":
        if not self.lazy:
            return self
        t = self.table(cap)
        return Automaton(
            self.states,
            self.inputs,
            {(q, x): self.states[t[i][j]] for i, q in enumerate(self.states) for j, x in enumerate(self.inputs)},
            name=self.name,
            state_label=self.state_label,
            input_label=self.input_label,
            parse_state=self._parse_state,
            parse_input=self._parse_input,
        )

    def restrict(self, states, inputs) -> "Automaton":
        """The subautomaton on ``states`` x ``inputs`` (closure is enforced)."""
        return Subautomaton(self, states, inputs).automaton()

    def transitions(self) -> Iterator[tuple]:
        for q in self.states:
            for x in self.inputs:
                yield q, x, self.step(q, x)

    def same_table(self, other: "Automaton") -> bool:
        return (
            list(self.states) == list(other.states)
            and list(self.inputs) == list(other.inputs)
            and all(self.step(q, x) == other.step(q, x) for q in self.states for x in self.inputs)
        )

    def __repr__(self):
        mode = "lazy" if self.lazy else "explicit"
        return f"<Automaton {self.name or '?'} |Q|={len(self.states)} |Sigma|={len(self.inputs)} {mode}>"


# canonical machines

SIGMA0, SIGMA1, SIGMA2 = "s0", "s1", "s2"


def reset_automaton() -> Automaton:
    return Automaton(
        (1, 2),
        (SIGMA0, SIGMA1),
        {(i, SIGMA0): 1 for i in (1, 2)} | {(i, SIGMA1): 2 for i in (1, 2)},
        name="reset",
        parse_state=int,
    )


def standard_automaton(n: int) -> Automaton:
    if n <= 1:
        raise ValueError("standard automata need n > 1")
    delta = {}
    for i in range(1, n + 1):
        delta[i, SIGMA0] = i
        delta[i, SIGMA1] = i % n + 1
        delta[i, SIGMA2] = {1: 2, 2: 1}.get(i, i)
    return Automaton(range(1, n + 1), (SIGMA0, SIGMA1, SIGMA2), delta, name=f"standard{n}", parse_state=int)


def full_transformation_automaton(n: int) -> Automaton:
    """Letters ``s1..s{n^n}`` are all maps [n] -> [n], lexicographic by value vector."""
    from .program import all_maps

    if n < 1:
        raise ValueError("T_n needs n >= 1")
    maps = all_maps(n)
    letters = tuple(f"s{k}" for k in range(1, len(maps) + 1))
    delta = {(j, letters[k]): sigma[j - 1] for k, sigma in enumerate(maps) for j in range(1, n + 1)}
    return Automaton(range(1, n + 1), letters, delta, name=f"T{n}", parse_state=int)


def elevator_automaton() -> Automaton:
    return Automaton(
        (1, 2),
        (SIGMA0, SIGMA1),
        {(1, SIGMA0): 1, (1, SIGMA1): 2, (2, SIGMA0): 2, (2, SIGMA1): 2},
        name="elevator",
        parse_state=int,
    )


def canonical_automaton(kind: str, n: Optional[int] = None) -> Automaton:
    if kind == "reset":
        return reset_automaton()
    if kind == "elevator":
        return elevator_automaton()
    if n is None:
        raise ValueError(f"{kind} needs a size parameter")
    if kind == "standard":
        return standard_automaton(int(n))
    if kind == "tn":
        return full_transformation_automaton(int(n))
    raise ValueError(f"unknown canonical automaton {kind!r}")


def characteristic_automaton(
    P: Program, mode: str = "explicit", cap: int = DEFAULT_EXPLICIT_ATOMS_CAP
) -> Automaton:
    """``<I_P, I_P, psi_P>``; states and letters are interpretation masks."""
    space = P.interpretations()
    compiled = P.compiled
    common = dict(
        name=f"Psi[{' '.join(r.render() for r in P.rules)}]",
        state_label=P.render_interp,
        input_label=P.render_interp,
        parse_state=P.parse_interp,
        parse_input=P.parse_interp,
    )
    if mode == "lazy":
        return Automaton(space, space, lambda I, J: _psi(compiled, I, J), **common)
    if mode != "explicit":
        raise ValueError(f"unknown mode {mode!r}")
    if P.width > cap:
        raise CapExceeded(f"explicit characteristic automaton needs |alphabet| <= {cap}, got {P.width}")
    return Automaton(space, space, {(I, J): _psi(compiled, I, J) for I in space for J in space}, **common)


# substructures and morphisms


class Subautomaton:
    """A closed selection of states and letters of a parent automaton."""

    def __init__(self, parent: Automaton, states, inputs):
        states = tuple(states)
        inputs = tuple(inputs)
        if not inputs:
            raise ValueError("a subautomaton needs at least one input")
        if len(set(states)) != len(states) or len(set(inputs)) != len(inputs):
            raise ValueError("duplicate states or inputs in selection")
        for q in states:
            if not parent.has_state(q):
                raise ValueError(f"{q!r} is not a state of the parent")
        for x in inputs:
            if not parent.has_input(x):
                raise ValueError(f"{x!r} is not an input of the parent")
        members = set(states)
        for q in states:
            for x in inputs:
                r = parent.step(q, x)
                if r not in members:
                    raise ValueError(f"selection not closed: delta({q!r}, {x!r}) = {r!r} escapes")
        self.parent = parent
        self.states = states
        self.inputs = inputs

    def automaton(self) -> Automaton:
        p = self.parent
        return Automaton(
            self.states,
            self.inputs,
            {(q, x): p.step(q, x) for q in self.states for x in self.inputs},
            name=f"sub({p.name})",
            state_label=p.state_label,
            input_label=p.input_label,
            parse_state=p._parse_state,
            parse_input=p._parse_input,
        )


def closure(a: Automaton, seeds, inputs=None) -> set:
    """Smallest set of states containing ``seeds`` and closed under ``inputs``."""
    inputs = a.inputs if inputs is None else inputs
    seen = set(seeds)
    todo = list(seen)
    while todo:
        q = todo.pop()
        for x in inputs:
            r = a.step(q, x)
            if r not in seen:
                seen.add(r)
                todo.append(r)
    return seen


@dataclass(frozen=True)
class MorphismPair:
    """``h1`` on states, ``h2`` on letters; ``h2`` defaults to the identity."""

    h1: dict
    h2: Optional[dict] = None

    def with_identity_inputs(self, source: Automaton) -> "MorphismPair":
        if self.h2 is not None:
            return self
        return MorphismPair(dict(self.h1), {x: x for x in source.inputs})


@dataclass
class MorphismReport:
    ok: bool
    mode: str
    equations: int = 0
    violations: list = field(default_factory=list)
    problems: list = field(default_factory=list)

    def __bool__(self):
        return self.ok

    def summary(self) -> str:
        if self.ok:
            return f"{self.mode}: ok ({self.equations} equations)"
        parts = list(self.problems)
        parts += [f"h1(delta({q!r},{x!r}))={l!r} != {r!r}" for q, x, l, r in self.violations[:5]]
        return f"{self.mode}: FAILED; " + "; ".join(parts)


MODES = ("homomorphism", "isomorphism", "embedding")


def check_morphism(source: Automaton, target: Automaton, h: MorphismPair, mode: str = "homomorphism") -> MorphismReport:
    """Exhaustively check ``h1(delta(q, x)) == delta'(h1(q), h2(x))``.

    ``embedding`` asks for injective components instead of surjective ones;
    ``isomorphism`` asks for both.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    h = h.with_identity_inputs(source)
    report = MorphismReport(ok=True, mode=mode)
    h1, h2 = h.h1, h.h2
    for what, mapping, dom, cod, has in (
        ("h1", h1, source.states, target.states, target.has_state),
        ("h2", h2, source.inputs, target.inputs, target.has_input),
    ):
        missing = [q for q in dom if q not in mapping]
        if missing:
            report.problems.append(f"{what} undefined on {missing[:3]!r}")
        bad = [v for q, v in mapping.items() if not has(v)]
        if bad:
            report.problems.append(f"{what} values outside the target: {bad[:3]!r}")
        image = {mapping[q] for q in dom if q in mapping}
        if mode in ("homomorphism", "isomorphism") and len(image) != len(cod):
            report.problems.append(f"{what} is not surjective")
        if mode in ("isomorphism", "embedding") and len(image) != len(dom):
            report.problems.append(f"{what} is not injective")
    if report.problems:
        report.ok = False
        return report
    for q in source.states:
        for x in source.inputs:
            lhs = h1[source.step(q, x)]
            rhs = target.step(h1[q], h2[x])
            report.equations += 1
            if lhs != rhs:
                report.violations.append((q, x, lhs, rhs))
    report.ok = not report.violations
    return report


def identity_pair(a: Automaton) -> MorphismPair:
    return MorphismPair({q: q for q in a.states}, {x: x for x in a.inputs})


@dataclass(frozen=True)
class Partition:
    """Blocks of states; each block and the block list are in canonical order."""

    blocks: tuple

    @classmethod
    def of(cls, a: Automaton, blocks) -> "Partition":
        idx = a.state_index
        blocks = [tuple(sorted(b, key=idx)) for b in blocks]
        if any(not b for b in blocks):
            raise ValueError("empty block")
        members = [q for b in blocks for q in b]
        if len(members) != len(set(members)):
            raise ValueError("blocks overlap")
        if set(members) != set(a.states) or len(members) != len(a.states):
            raise ValueError("blocks do not cover the state set")
        return cls(tuple(sorted(blocks, key=lambda b: idx(b[0]))))

    @classmethod
    def diagonal(cls, a: Automaton) -> "Partition":
        return cls(tuple((q,) for q in a.states))

    @classmethod
    def kernel(cls, a: Automaton, f: Mapping) -> "Partition":
        groups = {}
        for q in a.states:
            groups.setdefault(f[q], []).append(q)
        return cls.of(a, groups.values())

    def block_of(self) -> dict:
        return {q: b for b in self.blocks for q in b}

    @property
    def is_diagonal(self) -> bool:
        return all(len(b) == 1 for b in self.blocks)


def congruence_violation(a: Automaton, p: Partition):
    """A witness ``(q, q2, x)`` showing ``p`` is not a congruence, else None."""
    block = p.block_of()
    for b in p.blocks:
        q0 = b[0]
        for x in a.inputs:
            target = block[a.step(q0, x)]
            for q in b[1:]:
                if block[a.step(q, x)] != target:
                    return q0, q, x
    return None


def _block_label(a):
    return lambda b: "[" + "|".join(a.state_label(q) for q in b) + "]"


def quotient_by(a: Automaton, p: Partition) -> Automaton:
    witness = congruence_violation(a, p)
    if witness is not None:
        raise NotACongruence(*witness)
    block = p.block_of()
    return Automaton(
        p.blocks,
        a.inputs,
        {(b, x): block[a.step(b[0], x)] for b in p.blocks for x in a.inputs},
        name=f"{a.name}/~",
        state_label=_block_label(a),
        input_label=a.input_label,
        parse_input=a._parse_input,
    )


def natural_map(p: Partition) -> MorphismPair:
    return MorphismPair(p.block_of())


# brute-force morphism search


def _letter_maps(source_n, target_n, mode):
    if mode == "isomorphism":
        if source_n != target_n:
            return
        yield from itertools.permutations(range(target_n))
    elif mode == "embedding":
        yield from itertools.permutations(range(target_n), source_n)
    else:
        for m in itertools.product(range(target_n), repeat=source_n):
            if len(set(m)) == target_n:
                yield m


def iter_morphisms(
    source: Automaton,
    target: Automaton,
    mode: str = "homomorphism",
    *,
    max_states: int = 12,
    max_inputs: int = 12,
    max_nodes: int = 1_000_000,
) -> Iterator[MorphismPair]:
    """All morphisms of the given mode, letter maps and then state maps in lexicographic order."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if len(source.states) > max_states or len(source.inputs) > max_inputs:
        raise BudgetExceeded(
            f"source has {len(source.states)} states/{len(source.inputs)} inputs; "
            f"budget is {max_states}/{max_inputs}"
        )
    if mode == "embedding" and (target.lazy or len(target.states) > 64 * max_states):
        raise BudgetExceeded("embedding search needs a small explicit target")
    src = source.table()
    tgt = target.table()
    ns, nt = len(src), len(tgt)
    injective = mode in ("isomorphism", "embedding")
    surjective = mode in ("homomorphism", "isomorphism")
    if surjective and ns < nt or injective and ns > nt:
        return
    nodes = 0

    for lm in _letter_maps(len(source.inputs), len(target.inputs), mode):
        # h1 by propagation: fixing h1(q) forces h1 on everything reachable from q
        def extend(h, q, v):
            h = dict(h)
            used = set(h.values())
            if q in h:
                return h if h[q] == v else None
            if injective and v in used:
                return None
            h[q] = v
            used.add(v)
            todo = [q]
            while todo:
                p = todo.pop()
                for j, r in enumerate(src[p]):
                    w = tgt[h[p]][lm[j]]
                    if r in h:
                        if h[r] != w:
                            return None
                    else:
                        if injective and w in used:
                            return None
                        h[r] = w
                        used.add(w)
                        todo.append(r)
            return h

        def search(h):
            nonlocal nodes
            nodes += 1
            if nodes > max_nodes:
                raise BudgetExceeded(f"morphism search exceeded {max_nodes} nodes")
            free = next((q for q in range(ns) if q not in h), None)
            if free is None:
                if surjective and len(set(h.values())) != nt:
                    return
                yield h
                return
            for v in range(nt):
                h2 = extend(h, free, v)
                if h2 is not None:
                    yield from search(h2)

        for h in search({}):
            yield MorphismPair(
                {source.states[q]: target.states[v] for q, v in sorted(h.items())},
                {x: target.inputs[lm[j]] for j, x in enumerate(source.inputs)},
            )


def find_morphism(source: Automaton, target: Automaton, mode: str = "homomorphism", **budget) -> Optional[MorphismPair]:
    return next(iter_morphisms(source, target, mode, **budget), None)


# DOT export

DOT_STATE_CAP = 64


def _dot_quote(s):
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(a: Automaton) -> str:
    if len(a.states) > DOT_STATE_CAP:
        raise CapExceeded(f"DOT export is limited to {DOT_STATE_CAP} states")
    lines = ["digraph {", "  rankdir=LR;"]
    for q in a.states:
        lines.append(f"  {_dot_quote(a.state_label(q))};")
    for q in a.states:
        edges = {}
        for x in a.inputs:
            edges.setdefault(a.step(q, x), []).append(a.input_label(x))
        for r in sorted(edges, key=a.state_index):
            label = ",".join(edges[r])
            lines.append(f"  {_dot_quote(a.state_label(q))} -> {_dot_quote(a.state_label(r))} [label={_dot_quote(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
