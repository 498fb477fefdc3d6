"""JSON file formats for automata, cascade/program products, certificates and bundles.

Loaded automata live in label space: their states and letters are the label
strings from the file.  Program-level products that carry their input
program parse global inputs back to interpretation masks.
"""
from __future__ import annotations

import itertools
import json

from .automata import Automaton, reset_automaton, standard_automaton
from .cascade import CascadeSpec, FeedTable, ProgramProduct
from .program import Program, parse_program, render_program, reset_program, standard_program
from .represent import Certificate


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from None


def _require(obj, key, kind=None):
    if not isinstance(obj, dict) or key not in obj:
        raise ValueError(f"missing field {key!r}")
    value = obj[key]
    if kind is not None and not isinstance(value, kind):
        raise ValueError(f"field {key!r} has the wrong type")
    return value


# automata


def automaton_to_json(a: Automaton) -> dict:
    t = a.table()
    return {
        "states": [a.state_label(q) for q in a.states],
        "inputs": [a.input_label(x) for x in a.inputs],
        "delta": [list(row) for row in t],
    }


def automaton_from_json(obj: dict, name: str = "") -> Automaton:
    states = _require(obj, "states", list)
    inputs = _require(obj, "inputs", list)
    delta = _require(obj, "delta", list)
    if len(set(states)) != len(states) or len(set(inputs)) != len(inputs):
        raise ValueError("duplicate state or input label")
    if len(delta) != len(states):
        raise ValueError(f"delta has {len(delta)} rows for {len(states)} states")
    table = {}
    for q, row in zip(states, delta):
        if not isinstance(row, list) or len(row) != len(inputs):
            raise ValueError(f"row for state {q!r} must have {len(inputs)} entries")
        for x, r in zip(inputs, row):
            if not isinstance(r, int) or not 0 <= r < len(states):
                raise ValueError(f"delta({q!r}, {x!r}) = {r!r} is not a state index")
            table[q, x] = states[r]
    return Automaton([str(q) for q in states], [str(x) for x in inputs], table, name=name or "loaded")


# products


def _program_factor(P: Program) -> dict:
    if P == reset_program():
        return {"kind": "reset"}
    for n in range(2, 17):
        if P == standard_program(n):
            return {"kind": "standard", "n": n}
    return {"kind": "inline", "inline": render_program(P)}


def _automaton_factor(a: Automaton) -> dict:
    if a.same_table(reset_automaton()):
        return {"kind": "reset"}
    n = len(a.states)
    if n > 1 and a.same_table(standard_automaton(n)):
        return {"kind": "standard", "n": n}
    return {"kind": "inline", "inline": automaton_to_json(a)}


def _nest(fn, spaces, inputs):
    """Nested array indexed by one level per space, then by input index."""
    def build(prefix, depth):
        if depth == len(spaces):
            return [fn(prefix, x) for x in inputs]
        return [build(prefix + (q,), depth + 1) for q in spaces[depth]]

    return build((), 0)


def product_to_json(product, input_label=str) -> dict:
    """``input_label`` renders global inputs of automaton-level cascades."""
    if isinstance(product, ProgramProduct):
        level = "program"
        factors = [_program_factor(P) for P in product.factors]
        spaces = [P.interpretations() for P in product.factors]
        letter_index = [lambda J: J for _ in product.factors]
        labels = [product.input_label(x) for x in product.global_inputs]
    elif isinstance(product, CascadeSpec):
        level = "automaton"
        factors = [_automaton_factor(a) for a in product.factors]
        spaces = [a.states for a in product.factors]
        letter_index = [a.input_index for a in product.factors]
        labels = [input_label(x) for x in product.global_inputs]
    else:
        raise TypeError(f"cannot serialize {type(product).__name__}")
    psi = []
    for i, comp in enumerate(product.psi):
        if not isinstance(comp, FeedTable):
            raise ValueError(f"component {i + 1} is not tabulated and cannot be serialized")
        psi.append(_nest(lambda prefix, x, i=i, comp=comp: letter_index[i](comp(prefix, x)), spaces[:i], product.global_inputs))
    out = {"level": level, "factors": factors, "global_inputs": labels, "psi": psi}
    if isinstance(product, ProgramProduct) and product.input_program is not None:
        out["input_program"] = render_program(product.input_program)
    return out


def _factor_from_json(spec: dict, level: str):
    kind = _require(spec, "kind", str)
    if kind == "reset":
        return reset_program() if level == "program" else reset_automaton()
    if kind == "standard":
        n = _require(spec, "n", int)
        return standard_program(n) if level == "program" else standard_automaton(n)
    if kind == "inline":
        body = _require(spec, "inline")
        if level == "program":
            if not isinstance(body, str):
                raise ValueError("inline program factor must be program text")
            return parse_program(body)
        return automaton_from_json(body)
    raise ValueError(f"unknown factor kind {kind!r}")


def _lookup_nested(table, path, i):
    node = table
    for k in path:
        if not isinstance(node, list) or k >= len(node):
            raise ValueError(f"psi table {i + 1} has the wrong shape")
        node = node[k]
    if not isinstance(node, int):
        raise ValueError(f"psi table {i + 1} has the wrong shape")
    return node


def product_from_json(obj: dict):
    level = obj.get("level", "program")
    if level not in ("program", "automaton"):
        raise ValueError(f"unknown level {level!r}")
    factors = [_factor_from_json(f, level) for f in _require(obj, "factors", list)]
    labels = _require(obj, "global_inputs", list)
    tables = _require(obj, "psi", list)
    if len(tables) != len(factors):
        raise ValueError(f"{len(factors)} factors but {len(tables)} psi tables")
    input_program = None
    if level == "program" and "input_program" in obj:
        input_program = parse_program(obj["input_program"])
        inputs = [input_program.parse_interp(s) for s in labels]
    else:
        inputs = [str(s) for s in labels]
    if level == "program":
        spaces = [list(P.interpretations()) for P in factors]
        letters = [list(P.interpretations()) for P in factors]
    else:
        spaces = [list(a.states) for a in factors]
        letters = [list(a.inputs) for a in factors]
    psi = []
    for i, table in enumerate(tables):
        entries = {}
        ranges = [range(len(s)) for s in spaces[:i]] + [range(len(inputs))]
        for path in itertools.product(*ranges):
            k = _lookup_nested(table, path, i)
            if not 0 <= k < len(letters[i]):
                raise ValueError(f"psi table {i + 1}: letter index {k} out of range")
            prefix = tuple(spaces[j][p] for j, p in enumerate(path[:-1]))
            entries[prefix, inputs[path[-1]]] = letters[i][k]
        psi.append(FeedTable(i, entries))
    if level == "program":
        return ProgramProduct(tuple(factors), inputs, tuple(psi), input_program=input_program)
    return CascadeSpec(tuple(factors), inputs, tuple(psi))


# certificates


def _component_labels(product):
    if isinstance(product, ProgramProduct):
        return [P.render_interp for P in product.factors], [P.parse_interp for P in product.factors], product.input_label, product.parse_input
    if isinstance(product, CascadeSpec):
        return [a.state_label for a in product.factors], [a.parse_state for a in product.factors], str, None
    raise TypeError(f"unsupported product {type(product).__name__}")


def certificate_to_json(cert: Certificate, product, target: Automaton, input_label=None) -> dict:
    fmt, _, fmt_input, _ = _component_labels(product)
    fmt_input = input_label or fmt_input
    return {
        "sub_states": [[f(q) for f, q in zip(fmt, s)] for s in cert.sub_states],
        "sub_inputs": [fmt_input(x) for x in cert.sub_inputs],
        "partition": [list(b) for b in cert.partition],
        "h1": [target.state_label(v) for v in cert.h1],
        "h2": [target.input_label(y) for y in cert.h2],
        "claim": cert.claim,
    }


def certificate_from_json(obj: dict, product, target: Automaton) -> Certificate:
    _, parse, _, parse_input = _component_labels(product)
    sub_states = []
    for s in _require(obj, "sub_states", list):
        if not isinstance(s, list) or len(s) != len(parse):
            raise ValueError(f"sub state {s!r} must list {len(parse)} components")
        sub_states.append(tuple(p(str(c)) for p, c in zip(parse, s)))
    raw_inputs = _require(obj, "sub_inputs", list)
    sub_inputs = [parse_input(str(x)) if parse_input else str(x) for x in raw_inputs]
    return Certificate(
        sub_states=sub_states,
        sub_inputs=sub_inputs,
        partition=[tuple(b) for b in _require(obj, "partition", list)],
        h1=[target.parse_state(str(v)) for v in _require(obj, "h1", list)],
        h2=[target.parse_input(str(y)) for y in _require(obj, "h2", list)],
        claim=obj.get("claim", "homomorphic"),
    )


# bundles


def bundle_to_json(result) -> dict:
    """Serialize a DecompositionResult (or any object with the same fields)."""
    target = result.target
    out = {"target": automaton_to_json(target)}
    if result.spec is not None:
        out["spec"] = product_to_json(result.spec, input_label=target.input_label)
        out["certificate"] = certificate_to_json(result.certificate, result.spec, target, input_label=_spec_input_label(result.spec, target))
    else:
        out["spec"] = None
        out["certificate"] = None
    if result.answer_sets is not None:
        out["answer_sets"] = [target.state_label(I) for I in result.answer_sets]
    out["status"] = result.status
    return out


def _spec_input_label(spec, target):
    if isinstance(spec, CascadeSpec):
        return target.input_label
    return None


def bundle_from_json(obj: dict):
    """``(target, product, certificate, answer_sets, status)`` in label space."""
    target = automaton_from_json(_require(obj, "target", dict), name="target")
    status = _require(obj, "status", str)
    if status not in ("verified", "inconclusive"):
        raise ValueError(f"unknown status {status!r}")
    product = cert = None
    if obj.get("spec") is not None:
        product = product_from_json(obj["spec"])
        if obj.get("certificate") is None:
            raise ValueError("bundle has a spec but no certificate")
        cert = certificate_from_json(obj["certificate"], product, target)
    return target, product, cert, obj.get("answer_sets"), status
