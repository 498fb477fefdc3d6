"""Cascade (loop-free) products of automata and of programs.

Component ``i`` (0-based) of a feedforward function sees only the current
states of factors ``0..i-1`` plus the global input: every component is called
as ``psi_i(prefix, x)`` where ``prefix`` is a tuple of exactly ``i`` states.
There is no way to hand it a later factor's state, so the loop-free condition
holds by construction.
"""
from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Callable, Optional

from .automata import Automaton, TupleSpace, characteristic_automaton
from .errors import CapExceeded, LoopFreeViolation
from .program import Program, _psi

DEFAULT_PRODUCT_CAP = 4096


class FeedTable:
    """Extensional component feedforward table ``{(prefix, x): letter}``."""

    def __init__(self, position: int, entries: dict):
        for key in entries:
            prefix = key[0]
            if not isinstance(prefix, tuple) or len(prefix) != position:
                raise LoopFreeViolation(
                    f"component {position + 1} may only read factors 1..{position}, "
                    f"got a key with prefix {prefix!r}"
                )
        self.position = position
        self.entries = dict(entries)

    @classmethod
    def tabulate(cls, position: int, prefix_spaces, inputs, fn: Callable) -> "FeedTable":
        return cls(
            position,
            {(prefix, x): fn(prefix, x) for prefix in itertools.product(*prefix_spaces) for x in inputs},
        )

    def __call__(self, prefix, x):
        return self.entries[prefix, x]

    def __eq__(self, other):
        return isinstance(other, FeedTable) and (self.position, self.entries) == (other.position, other.entries)

    def __repr__(self):
        return f"FeedTable(position={self.position}, entries={len(self.entries)})"


def _check_tables(factor_states, factor_inputs, inputs, psi):
    if len(psi) != len(factor_states):
        raise ValueError(f"{len(factor_states)} factors but {len(psi)} feedforward components")
    for i, comp in enumerate(psi):
        if isinstance(comp, FeedTable):
            if comp.position != i:
                raise LoopFreeViolation(f"table for component {comp.position + 1} placed at {i + 1}")
            expected = len(inputs)
            for s in factor_states[:i]:
                expected *= len(s)
            if len(comp.entries) != expected:
                raise ValueError(f"component {i + 1} table has {len(comp.entries)} entries, needs {expected}")
            for (prefix, x), letter in comp.entries.items():
                if x not in inputs:
                    raise ValueError(f"component {i + 1}: {x!r} is not a global input")
                for j, q in enumerate(prefix):
                    if q not in factor_states[j]:
                        raise ValueError(f"component {i + 1}: {q!r} is not a state of factor {j + 1}")
                if letter not in factor_inputs[i]:
                    raise ValueError(f"component {i + 1}: {letter!r} is not a letter of factor {i + 1}")
        elif not callable(comp):
            raise TypeError(f"component {i + 1} must be a FeedTable or a callable")


def _as_members(seq):
    return seq if isinstance(seq, (range, TupleSpace)) else frozenset(seq)


@dataclass(frozen=True, eq=False)
class CascadeSpec:
    """``A_1 x| ... x| A_k [Sigma, psi]``.  One factor is allowed."""

    factors: tuple
    global_inputs: Sequence
    psi: tuple

    def __post_init__(self):
        factors = tuple(self.factors)
        if not factors:
            raise ValueError("a cascade needs at least one factor")
        inputs = self.global_inputs
        if not isinstance(inputs, (range, TupleSpace)):
            inputs = tuple(inputs)
        if len(inputs) == 0:
            raise ValueError("global input alphabet must be nonempty")
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "global_inputs", inputs)
        object.__setattr__(self, "psi", tuple(self.psi))
        _check_tables(
            [_as_members(a.states) for a in factors],
            [_as_members(a.inputs) for a in factors],
            _as_members(inputs),
            self.psi,
        )

    @property
    def states(self) -> TupleSpace:
        return TupleSpace([a.states for a in self.factors])

    def letters(self, state: tuple, x) -> tuple:
        return tuple(self.psi[i](tuple(state[:i]), x) for i in range(len(self.factors)))

    def state_label(self, state) -> str:
        return "(" + ",".join(a.state_label(q) for a, q in zip(self.factors, state)) + ")"


def _check_state(factors, state):
    if not isinstance(state, tuple) or len(state) != len(factors):
        raise ValueError(f"state must be a tuple of {len(factors)} components, got {state!r}")
    for i, (a, q) in enumerate(zip(factors, state)):
        if not a.has_state(q):
            raise ValueError(f"component {i + 1} of {state!r} is not a state of factor {i + 1}")


def cascade_step(spec: CascadeSpec, state: tuple, x) -> tuple:
    """All factors move at once; letters come from the *current* earlier states."""
    _check_state(spec.factors, state)
    if x not in _as_members(spec.global_inputs):
        raise ValueError(f"{x!r} is not a global input")
    return tuple(a.step(q, letter) for a, q, letter in zip(spec.factors, state, spec.letters(state, x)))


def _product(spec: CascadeSpec, mode: str, cap: int, name: str, input_label=str, parse_input=None) -> Automaton:
    states = spec.states
    factors = spec.factors

    def parse_state(label):
        label = label.strip()
        if not (label.startswith("(") and label.endswith(")")):
            raise ValueError(f"product state must be parenthesized, got {label!r}")
        parts = _split_top(label[1:-1])
        if len(parts) != len(factors):
            raise ValueError(f"expected {len(factors)} components in {label!r}")
        return tuple(a.parse_state(p) for a, p in zip(factors, parts))

    common = dict(
        name=name,
        state_label=spec.state_label,
        input_label=input_label,
        parse_state=parse_state,
        parse_input=parse_input,
    )
    step = lambda q, x: cascade_step(spec, q, x)  # noqa: E731
    if mode == "lazy":
        return Automaton(states, spec.global_inputs, step, **common)
    if mode != "explicit":
        raise ValueError(f"unknown mode {mode!r}")
    if len(states) > cap:
        raise CapExceeded(f"product has {len(states)} states, cap is {cap}")
    return Automaton(states, spec.global_inputs, {(q, x): step(q, x) for q in states for x in spec.global_inputs}, **common)


def _split_top(text):
    """Split on commas not nested inside braces, brackets or parentheses."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "{[(":
            depth += 1
        elif ch in "}])":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur).strip())
    return parts


def product_automaton(spec: CascadeSpec, mode: str = "explicit", cap: int = DEFAULT_PRODUCT_CAP) -> Automaton:
    return _product(spec, mode, cap, name="cascade(" + ",".join(a.name for a in spec.factors) + ")")


@dataclass(frozen=True, eq=False)
class ProgramProduct:
    """``P_1 x| ... x| P_k [I_P, psi]``; letters of factor i are masks over ``P_i``.

    ``global_inputs`` are opaque labels.  When the product stands for a
    program P they are P's interpretation masks and ``input_program`` is P,
    which is then used to render and parse them.
    """

    factors: tuple
    global_inputs: Sequence
    psi: tuple
    input_program: Optional[Program] = None

    def __post_init__(self):
        factors = tuple(self.factors)
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "psi", tuple(self.psi))
        inputs = self.global_inputs
        if not isinstance(inputs, (range, TupleSpace)):
            inputs = tuple(inputs)
        object.__setattr__(self, "global_inputs", inputs)
        if not factors:
            raise ValueError("a product needs at least one factor")
        if len(inputs) == 0:
            raise ValueError("global input alphabet must be nonempty")
        spaces = [P.interpretations() for P in factors]
        _check_tables(spaces, spaces, _as_members(inputs), self.psi)

    @property
    def states(self) -> TupleSpace:
        return TupleSpace([P.interpretations() for P in self.factors])

    def state_label(self, state) -> str:
        return "(" + ",".join(P.render_interp(I) for P, I in zip(self.factors, state)) + ")"

    def input_label(self, x) -> str:
        if self.input_program is not None:
            return self.input_program.render_interp(x)
        return str(x)

    def parse_input(self, label: str):
        if self.input_program is not None:
            return self.input_program.parse_interp(label)
        for x in self.global_inputs:
            if str(x) == label:
                return x
        raise ValueError(f"no global input labelled {label!r}")

    def as_cascade(self) -> CascadeSpec:
        """The same product over the (lazy) characteristic automata of the factors."""
        return CascadeSpec(
            tuple(characteristic_automaton(P, mode="lazy") for P in self.factors),
            self.global_inputs,
            self.psi,
        )


def program_product_step(pp: ProgramProduct, state: tuple, J) -> tuple:
    if not isinstance(state, tuple) or len(state) != len(pp.factors):
        raise ValueError(f"state must be a tuple of {len(pp.factors)} interpretations, got {state!r}")
    for P, I in zip(pp.factors, state):
        P.check(I)
    if J not in _as_members(pp.global_inputs):
        raise ValueError(f"{J!r} is not a global input")
    out = []
    for i, (P, I) in enumerate(zip(pp.factors, state)):
        letter = P.check(pp.psi[i](tuple(state[:i]), J))
        out.append(_psi(P.compiled, I, letter))
    return tuple(out)


def product_char_automaton(pp: ProgramProduct, mode: str = "explicit", cap: int = DEFAULT_PRODUCT_CAP) -> Automaton:
    states = pp.states
    factors = pp.factors

    def parse_state(label):
        label = label.strip()
        if not (label.startswith("(") and label.endswith(")")):
            raise ValueError(f"product state must be parenthesized, got {label!r}")
        parts = _split_top(label[1:-1])
        if len(parts) != len(factors):
            raise ValueError(f"expected {len(factors)} components in {label!r}")
        return tuple(P.parse_interp(p) for P, p in zip(factors, parts))

    common = dict(
        name="product(" + ",".join(str(P.width) for P in factors) + ")",
        state_label=pp.state_label,
        input_label=pp.input_label,
        parse_state=parse_state,
        parse_input=pp.parse_input,
    )
    step = lambda q, x: program_product_step(pp, q, x)  # noqa: E731
    if mode == "lazy":
        return Automaton(states, pp.global_inputs, step, **common)
    if mode != "explicit":
        raise ValueError(f"unknown mode {mode!r}")
    if len(states) > cap:
        raise CapExceeded(f"product has {len(states)} states, cap is {cap}")
    return Automaton(states, pp.global_inputs, {(q, x): step(q, x) for q in states for x in pp.global_inputs}, **common)


def as_automaton(product, mode: str = "lazy", cap: int = DEFAULT_PRODUCT_CAP) -> Automaton:
    """Characteristic automaton of a program product, cascade spec or plain automaton."""
    if isinstance(product, Automaton):
        return product
    if isinstance(product, ProgramProduct):
        return product_char_automaton(product, mode, cap)
    if isinstance(product, CascadeSpec):
        return product_automaton(product, mode, cap)
    raise TypeError(f"cannot interpret {type(product).__name__} as an automaton")


def render_table(spec, i: int) -> str:
    """Canonical text of component ``i`` (0-based): one ``prefix, input -> letter`` per line."""
    if isinstance(spec, ProgramProduct):
        prefix_spaces = [P.interpretations() for P in spec.factors[:i]]
        fmt_prefix = [P.render_interp for P in spec.factors[:i]]
        fmt_letter = spec.factors[i].render_interp
        fmt_input = spec.input_label
    else:
        prefix_spaces = [a.states for a in spec.factors[:i]]
        fmt_prefix = [a.state_label for a in spec.factors[:i]]
        fmt_letter = spec.factors[i].input_label
        fmt_input = str
    lines = []
    for prefix in itertools.product(*prefix_spaces):
        for x in spec.global_inputs:
            shown = "(" + ",".join(f(q) for f, q in zip(fmt_prefix, prefix)) + ")"
            lines.append(f"{shown}, {fmt_input(x)} -> {fmt_letter(spec.psi[i](prefix, x))}")
    return "\n".join(lines)
