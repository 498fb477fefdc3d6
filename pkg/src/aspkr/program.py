"""Grounded normal logic programs and their 4-valued immediate-consequence operator.

Interpretations are plain ``int`` bit masks: bit ``i`` is set iff the atom
``program.alphabet[i]`` belongs to the interpretation.  The empty
interpretation is ``0`` and the full one is ``(1 << len(alphabet)) - 1``.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import AlphabetMismatch, CapExceeded, ProgramSyntaxError

ATOM_RE = re.compile(r"[a-z][A-Za-z0-9_]*|[0-9]+")

DEFAULT_ATOMS_CAP = 20


def atom_key(atom: str):
    """Sort key putting integer atoms first, in numeric order."""
    if atom.isdigit():
        return (0, int(atom), atom)
    return (1, 0, atom)


def _check_atom(atom: str) -> str:
    atom = str(atom)
    if not ATOM_RE.fullmatch(atom) or atom == "not":
        raise ValueError(f"invalid atom name {atom!r}")
    return atom


@dataclass(frozen=True)
class Rule:
    head: str
    pos: frozenset = frozenset()
    neg: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "head", _check_atom(self.head))
        object.__setattr__(self, "pos", frozenset(_check_atom(a) for a in self.pos))
        object.__setattr__(self, "neg", frozenset(_check_atom(a) for a in self.neg))

    @property
    def atoms(self):
        return {self.head} | self.pos | self.neg

    def sort_key(self):
        return (
            atom_key(self.head),
            sorted(map(atom_key, self.pos)),
            sorted(map(atom_key, self.neg)),
        )

    def render(self) -> str:
        body = [a for a in sorted(self.pos, key=atom_key)]
        body += ["not " + a for a in sorted(self.neg, key=atom_key)]
        if not body:
            return f"{self.head}."
        return f"{self.head} :- {', '.join(body)}."


@dataclass(frozen=True)
class Program:
    """A finite nonempty set of rules over an ordered alphabet.

    The alphabet may hold atoms that occur in no rule; they still widen the
    interpretation space.
    """

    alphabet: tuple
    rules: tuple
    _index: dict = field(init=False, repr=False, compare=False)
    _compiled: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        alphabet = tuple(_check_atom(a) for a in self.alphabet)
        if not alphabet:
            raise ValueError("alphabet must be nonempty")
        if len(set(alphabet)) != len(alphabet):
            raise ValueError("alphabet contains duplicates")
        rules = tuple(sorted(set(self.rules), key=Rule.sort_key))
        if not rules:
            raise ValueError("a program needs at least one rule")
        index = {a: i for i, a in enumerate(alphabet)}
        for r in rules:
            missing = r.atoms - index.keys()
            if missing:
                raise ValueError(f"rule {r.render()!r} uses atoms outside the alphabet: {sorted(missing)}")
        compiled = tuple(
            (1 << index[r.head], self._mask(index, r.pos), self._mask(index, r.neg)) for r in rules
        )
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "rules", rules)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_compiled", compiled)

    @staticmethod
    def _mask(index, atoms):
        m = 0
        for a in atoms:
            m |= 1 << index[a]
        return m

    @classmethod
    def from_rules(cls, rules: Iterable[Rule], extra_atoms: Iterable[str] = ()) -> "Program":
        rules = list(rules)
        atoms = set(extra_atoms)
        for r in rules:
            atoms |= r.atoms
        return cls(tuple(sorted(atoms, key=atom_key)), tuple(rules))

    # interpretations

    @property
    def width(self) -> int:
        return len(self.alphabet)

    @property
    def full(self) -> int:
        return (1 << self.width) - 1

    def interp(self, *atoms: str) -> int:
        """Mask of the given atoms; ``P.interp()`` is the empty interpretation."""
        try:
            return self._mask(self._index, [str(a) for a in atoms])
        except KeyError as exc:
            raise AlphabetMismatch(f"atom {exc.args[0]!r} is not in the alphabet") from None

    def atoms_of(self, mask: int) -> tuple:
        self.check(mask)
        return tuple(a for i, a in enumerate(self.alphabet) if mask >> i & 1)

    def render_interp(self, mask: int) -> str:
        return "{" + ",".join(self.atoms_of(mask)) + "}"

    def parse_interp(self, text: str) -> int:
        text = text.strip()
        if not (text.startswith("{") and text.endswith("}")):
            raise ValueError(f"interpretation must be written in braces, got {text!r}")
        inner = text[1:-1].strip()
        atoms = [a.strip() for a in inner.split(",")] if inner else []
        return self.interp(*atoms)

    def interpretations(self) -> range:
        return range(1 << self.width)

    def check(self, mask: int) -> int:
        if not isinstance(mask, int) or mask < 0 or mask >> self.width:
            raise AlphabetMismatch(f"{mask!r} is not an interpretation over {self.width} atoms")
        return mask

    def render(self) -> str:
        used = set().union(*(r.atoms for r in self.rules))
        lines = []
        if used != set(self.alphabet):
            lines.append("#alphabet " + ", ".join(self.alphabet) + ".")
        lines += [r.render() for r in self.rules]
        return "\n".join(lines) + "\n"

    @property
    def compiled(self):
        return self._compiled


# operator semantics


def psi(P: Program, I: int, J: int) -> int:
    """Heads of the rules whose positive body holds in I and negative body misses J."""
    P.check(I)
    P.check(J)
    return _psi(P._compiled, I, J)


def _psi(compiled, I, J):
    out = 0
    for head, pos, neg in compiled:
        if pos & ~I == 0 and neg & J == 0:
            out |= head
    return out


def lfp_trace(P: Program, J: int) -> list:
    """Kleene iterates of ``psi(P, ., J)`` from the empty set up to the fixpoint."""
    P.check(J)
    chain = [0]
    while True:
        nxt = _psi(P._compiled, chain[-1], J)
        if nxt == chain[-1]:
            return chain
        chain.append(nxt)


def lfp_psi(P: Program, J: int) -> int:
    return lfp_trace(P, J)[-1]


def answer_sets(P: Program, cap: int = DEFAULT_ATOMS_CAP) -> list:
    """All I with I = lfp psi(P, ., I), by enumeration, sorted by mask."""
    if P.width > cap:
        raise CapExceeded(f"alphabet has {P.width} atoms, enumeration cap is {cap}")
    return [I for I in P.interpretations() if lfp_psi(P, I) == I]


def is_positive(P: Program) -> bool:
    return all(not r.neg for r in P.rules)


@dataclass(frozen=True)
class Classification:
    positive: bool
    levels: Optional[dict]

    @property
    def tight(self) -> bool:
        return self.levels is not None


def level_mapping(P: Program) -> Optional[dict]:
    """Longest-path layering of the positive dependency graph, or None on a cycle."""
    preds = {a: set() for a in P.alphabet}
    for r in P.rules:
        preds[r.head] |= r.pos
    levels = {}
    state = {}

    def visit(a):
        # iterative DFS so deep chains do not hit the recursion limit
        stack = [(a, iter(sorted(preds[a], key=atom_key)))]
        state[a] = "open"
        while stack:
            node, it = stack[-1]
            for b in it:
                s = state.get(b)
                if s == "open":
                    return False
                if s is None:
                    state[b] = "open"
                    stack.append((b, iter(sorted(preds[b], key=atom_key))))
                    break
            else:
                stack.pop()
                state[node] = "done"
                levels[node] = max((levels[b] + 1 for b in preds[node]), default=0)
        return True

    for a in P.alphabet:
        if a not in state and not visit(a):
            return None
    return {a: levels[a] for a in P.alphabet}


def classify(P: Program) -> Classification:
    return Classification(is_positive(P), level_mapping(P))


def check_level_mapping(P: Program, levels: dict) -> bool:
    return set(levels) == set(P.alphabet) and all(
        levels[r.head] > levels[b] for r in P.rules for b in r.pos
    )


# concrete syntax

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>%[^\n]*)|(?P<directive>#[A-Za-z_]+)"
    r"|(?P<if>:-)|(?P<comma>,)|(?P<dot>\.)|(?P<atom>[a-z][A-Za-z0-9_]*|[0-9]+)"
)


def _tokenize(text):
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ProgramSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        if kind == "nl":
            line, col = line + 1, 1
        elif kind not in ("ws", "comment"):
            yield kind, m.group(), line, col
        if kind != "nl":
            col += m.end() - m.start()
        pos = m.end()
    yield "eof", "", line, col


def parse_program(text: str) -> Program:
    tokens = list(_tokenize(text))
    pos = 0
    rules = []
    declared = None

    def peek():
        return tokens[pos]

    def take(kind):
        nonlocal pos
        tok = tokens[pos]
        if tok[0] != kind:
            what = repr(tok[1]) if tok[1] else "end of input"
            raise ProgramSyntaxError(f"expected {kind}, found {what}", tok[2], tok[3])
        pos += 1
        return tok

    def atom():
        tok = take("atom")
        if tok[1] == "not":
            raise ProgramSyntaxError("'not' is reserved", tok[2], tok[3])
        return tok[1]

    while peek()[0] != "eof":
        tok = peek()
        if tok[0] == "directive":
            if tok[1] != "#alphabet":
                raise ProgramSyntaxError(f"unknown directive {tok[1]}", tok[2], tok[3])
            if declared is not None:
                raise ProgramSyntaxError("duplicate alphabet declaration", tok[2], tok[3])
            pos += 1
            declared = []
            if peek()[0] != "dot":
                declared.append(atom())
                while peek()[0] == "comma":
                    pos += 1
                    declared.append(atom())
            take("dot")
            if len(set(declared)) != len(declared):
                raise ProgramSyntaxError("duplicate atom in alphabet declaration", tok[2], tok[3])
            continue
        head = atom()
        pos_body, neg_body = set(), set()
        if peek()[0] == "if":
            pos += 1
            while True:
                lit = take("atom")
                if lit[1] == "not" and tokens[pos][0] == "atom":
                    neg_body.add(atom())
                elif lit[1] == "not":
                    raise ProgramSyntaxError("'not' must be followed by an atom", lit[2], lit[3])
                else:
                    pos_body.add(lit[1])
                if peek()[0] != "comma":
                    break
                pos += 1
        take("dot")
        rules.append(Rule(head, frozenset(pos_body), frozenset(neg_body)))

    if not rules:
        tok = tokens[-1]
        raise ProgramSyntaxError("program has no rules", tok[2], tok[3])
    return Program.from_rules(rules, declared or ())


def render_program(P: Program) -> str:
    return P.render()


# canonical programs


def reset_program() -> Program:
    return Program.from_rules([Rule("1", neg={"1"})])


def standard_program(n: int) -> Program:
    if n <= 1:
        raise ValueError("the n-standard program needs n > 1")
    rules = []
    for i in range(1, n + 1):
        rules.append(Rule(str(i), pos={str(i)}, neg={"1"}))
        rules.append(Rule(str(i % n + 1), pos={str(i)}, neg={"2"}))
    rules.append(Rule("1", pos={"2"}, neg={"3"}))
    rules.append(Rule("2", pos={"1"}, neg={"3"}))
    for j in range(3, n + 1):
        rules.append(Rule(str(j), pos={str(j)}, neg={"3"}))
    return Program.from_rules(rules, extra_atoms=[str(i) for i in range(1, n + 1)] + ["3"])


def all_maps(n: int) -> list:
    """All maps [n] -> [n] as value tuples, in lexicographic order."""
    return list(itertools.product(range(1, n + 1), repeat=n))


def tn_program(n: int) -> Program:
    if n < 1:
        raise ValueError("T_n needs n >= 1")
    maps = all_maps(n)
    rules = [
        Rule(str(sigma[j - 1]), pos={str(j)}, neg={str(k)})
        for k, sigma in enumerate(maps, start=1)
        for j in range(1, n + 1)
    ]
    return Program.from_rules(rules, extra_atoms=[str(k) for k in range(1, len(maps) + 1)])


def facts_program(m: int, prefix: str = "a") -> Program:
    if m < 1:
        raise ValueError("facts program needs m >= 1")
    return Program.from_rules([Rule(f"{prefix}{i}") for i in range(1, m + 1)])


_EXAMPLES = {
    "exampleA": "a.\n",
    "exampleB": "a :- not b.\nb :- not a.\n",
    "exampleC": "a.\nb :- a.\nc :- a, b.\n",
    "exampleC'": "a.\nb :- a.\nc :- a.\nc :- b.\n",
    "elevator": "e :- e.\ne :- not e.\n",
}


def canonical_program(kind: str, n: Optional[int] = None) -> Program:
    if kind == "reset":
        return reset_program()
    if kind == "standard":
        return standard_program(_need(kind, n))
    if kind == "tn":
        return tn_program(_need(kind, n))
    if kind == "facts":
        return facts_program(_need(kind, n))
    kind = {"exampleCprime": "exampleC'"}.get(kind, kind)
    if kind in _EXAMPLES:
        return parse_program(_EXAMPLES[kind])
    raise ValueError(f"unknown canonical program {kind!r}")


def _need(kind, n):
    if n is None:
        raise ValueError(f"{kind} needs a size parameter")
    return int(n)
