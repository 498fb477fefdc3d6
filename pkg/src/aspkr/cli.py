"""``aspkr`` command line: one subcommand per pipeline stage.

Exit status: 0 success, 1 domain error, 2 usage error, 3 inconclusive search.
"""
from __future__ import annotations

import argparse
import sys

from . import decompose as dec
from .automata import DEFAULT_EXPLICIT_ATOMS_CAP, canonical_automaton, characteristic_automaton, to_dot
from .cascade import CascadeSpec, as_automaton, cascade_step, program_product_step
from .errors import AspKrError
from .formats import (
    automaton_from_json,
    automaton_to_json,
    bundle_from_json,
    bundle_to_json,
    certificate_from_json,
    dumps,
    product_from_json,
    read_json,
)
from .program import DEFAULT_ATOMS_CAP, answer_sets, canonical_program, classify, parse_program
from .represent import Certificate, answer_sets_via_product, verify_certificate

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3


class DomainError(Exception):
    pass


def _read_program(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise DomainError(f"{path}: {exc.strerror}") from None
    try:
        return parse_program(text)
    except AspKrError as exc:
        raise DomainError(f"{path}: {exc}") from None


def _load(path, loader):
    try:
        return loader(read_json(path))
    except OSError as exc:
        raise DomainError(f"{path}: {exc.strerror}") from None
    except (ValueError, TypeError, KeyError) as exc:
        raise DomainError(f"{path}: {exc}") from None


def _write(path, text, out):
    if path in (None, "-"):
        out.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise DomainError(f"{path}: {exc.strerror}") from None


def _check_atoms(P, args):
    if P.width > args.atoms_cap:
        raise DomainError(f"program has {P.width} atoms, cap is {args.atoms_cap}")


def _print_sets(P, sets, out):
    if not sets:
        out.write("no answer sets\n")
    for I in sets:
        out.write(P.render_interp(I) + "\n")


# subcommands


def cmd_answersets(args, out):
    P = _read_program(args.program)
    _check_atoms(P, args)
    _print_sets(P, answer_sets(P, cap=args.atoms_cap), out)


def cmd_classify(args, out):
    P = _read_program(args.program)
    c = classify(P)
    out.write(f"positive: {'yes' if c.positive else 'no'}\n")
    out.write(f"tight: {'yes' if c.tight else 'no'}\n")
    if c.tight:
        for a in P.alphabet:
            out.write(f"level {a} = {c.levels[a]}\n")


def cmd_charaut(args, out):
    P = _read_program(args.program)
    _check_atoms(P, args)
    a = characteristic_automaton(P, mode="lazy" if args.lazy else "explicit", cap=DEFAULT_EXPLICIT_ATOMS_CAP)
    if args.dot:
        out.write(to_dot(a))
    elif args.json:
        out.write(dumps(automaton_to_json(a)))
    else:
        for q, x, r in a.transitions():
            out.write(f"{P.render_interp(q)}, {P.render_interp(x)} -> {P.render_interp(r)}\n")


def cmd_canonical(args, out):
    as_program = args.as_program or (not args.as_automaton and args.kind != "tn")
    if as_program:
        kind = "elevator" if args.kind == "elevator" else args.kind
        out.write(canonical_program(kind, args.n).render())
        return
    if args.kind == "facts":
        raise DomainError("facts has no canonical automaton; use --as-program")
    out.write(dumps(automaton_to_json(canonical_automaton(args.kind, args.n))))


def cmd_product_step(args, out):
    product = _load(args.product, product_from_json)
    a = as_automaton(product, mode="lazy")
    try:
        state = a.parse_state(args.state)
        x = a.parse_input(args.input)
    except (ValueError, AspKrError) as exc:
        raise DomainError(str(exc)) from None
    step = program_product_step if not isinstance(product, CascadeSpec) else cascade_step
    if not args.iterate:
        out.write(a.state_label(step(product, state, x)) + "\n")
        return
    out.write(a.state_label(state) + "\n")
    for _ in range(len(a.states) + 1):
        nxt = step(product, state, x)
        if nxt == state:
            return
        out.write(a.state_label(nxt) + "\n")
        state = nxt
    raise DomainError("iteration did not reach a fixpoint")


def _report_result(result, args, out):
    if args.output:
        _write(args.output, dumps(bundle_to_json(result)), out)
    if not result.verified:
        for note in result.notes:
            out.write(note + "\n")
        out.write("inconclusive\n")
        return EXIT_INCONCLUSIVE
    census = ", ".join(f"{k} x{v}" for k, v in result.factor_census.items())
    out.write(f"factors: {census}\n")
    out.write(result.report.summary() + "\n")
    if result.answer_sets is not None:
        out.write("answer sets via product:\n")
        target = result.target
        if not result.answer_sets:
            out.write("no answer sets\n")
        for I in result.answer_sets:
            out.write(target.state_label(I) + "\n")
    return EXIT_OK


def cmd_compile_positive(args, out):
    P = _read_program(args.program)
    _check_atoms(P, args)
    return _report_result(dec.compile_positive_tight(P), args, out)


def cmd_tn_embed(args, out):
    r = dec.build_tn_embedding(args.n, max_n=args.max_n)
    out.write(r.report.summary() + "\n")
    return EXIT_OK if r.report.ok else EXIT_DOMAIN


def cmd_decompose(args, out):
    if (args.automaton is None) == (args.program is None):
        raise DomainError("give exactly one of an automaton file or --program")
    if args.program:
        P = _read_program(args.program)
        _check_atoms(P, args)
        target = characteristic_automaton(P, mode="explicit", cap=min(args.atoms_cap, DEFAULT_EXPLICIT_ATOMS_CAP))
    else:
        target = _load(args.automaton, automaton_from_json)
    result = dec.decompose_automaton(target, max_factors=args.max_factors, max_states=args.state_cap)
    return _report_result(result, args, out)


def cmd_kr_pipeline(args, out):
    P = _read_program(args.program)
    result = dec.kr_pipeline(
        P,
        max_atoms=args.max_atoms,
        max_factors=args.max_factors,
        program_search=not args.no_program_search,
    )
    return _report_result(result, args, out)


def cmd_verify(args, out):
    product = _load(args.product, product_from_json)
    target = _load(args.target, automaton_from_json)
    try:
        cert = _load(args.cert, lambda obj: certificate_from_json(obj, product, target))
        report = verify_certificate(product, target, cert)
    except AspKrError as exc:
        raise DomainError(str(exc)) from None
    out.write(report.summary() + "\n")
    for v in report.violations[:5]:
        out.write(f"  {v}\n")
    return EXIT_OK if report else EXIT_DOMAIN


def cmd_answersets_via(args, out):
    P = _read_program(args.program)
    target, product, cert, _, status = _load(args.bundle, bundle_from_json)
    if status != "verified" or product is None:
        raise DomainError("bundle holds no verified representation")
    if isinstance(product, CascadeSpec):
        raise DomainError("bundle is an automaton-level cascade; answer sets need a program product")
    try:
        relabel = Certificate(
            cert.sub_states,
            cert.sub_inputs,
            cert.partition,
            [P.parse_interp(v) for v in cert.h1],
            [P.parse_interp(y) for y in cert.h2],
            cert.claim,
        )
        sets = answer_sets_via_product(P, product, relabel)
    except (AspKrError, ValueError) as exc:
        raise DomainError(str(exc)) from None
    _print_sets(P, sets, out)


# parser


def _positive(text):
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aspkr", description="Answer-set programs as cascades of reset and standard programs.")
    parser.add_argument("--atoms-cap", type=_positive, default=DEFAULT_ATOMS_CAP, help="largest program alphabet to enumerate")
    parser.add_argument("--state-cap", type=_positive, default=1024, help="largest product state space to build")
    parser.add_argument("--seed", type=int, default=0, help="seed for corpus helpers (never affects search)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("answersets", help="enumerate answer sets")
    p.add_argument("program")
    p.set_defaults(func=cmd_answersets)

    p = sub.add_parser("classify", help="report positivity and tightness")
    p.add_argument("program")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("charaut", help="characteristic automaton")
    p.add_argument("program")
    p.add_argument("--lazy", action="store_true")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--dot", action="store_true")
    fmt.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_charaut)

    p = sub.add_parser("canonical", help="print a canonical program or automaton")
    p.add_argument("kind", choices=["reset", "standard", "tn", "elevator", "facts"])
    p.add_argument("n", nargs="?", type=_positive)
    as_ = p.add_mutually_exclusive_group()
    as_.add_argument("--as-program", action="store_true")
    as_.add_argument("--as-automaton", action="store_true")
    p.set_defaults(func=cmd_canonical)

    p = sub.add_parser("product-step", help="one transition of a product")
    p.add_argument("product")
    p.add_argument("--state", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--iterate", action="store_true", help="repeat until the state is stable, printing each state")
    p.set_defaults(func=cmd_product_step)

    p = sub.add_parser("compile-positive", help="reset-program product of a positive tight program")
    p.add_argument("program")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_compile_positive)

    p = sub.add_parser("tn-embed", help="check the T_n embedding")
    p.add_argument("n", type=_positive)
    p.add_argument("--max-n", type=_positive, default=dec.DEFAULT_TN_MAX)
    p.set_defaults(func=cmd_tn_embed)

    p = sub.add_parser("decompose", help="cascade decomposition of an automaton")
    p.add_argument("automaton", nargs="?")
    p.add_argument("--program")
    p.add_argument("--max-factors", type=_positive, default=dec.DEFAULT_MAX_FACTORS)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("kr-pipeline", help="represent a program by reset and standard programs")
    p.add_argument("program")
    p.add_argument("--max-factors", type=_positive, default=dec.DEFAULT_MAX_FACTORS)
    p.add_argument("--max-atoms", type=_positive, default=dec.DEFAULT_PIPELINE_ATOMS)
    p.add_argument("--no-program-search", action="store_true", help="skip the search over full program alphabets")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_kr_pipeline)

    p = sub.add_parser("verify", help="check a certificate")
    p.add_argument("--product", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--cert", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("answersets-via", help="answer sets through a bundle's product")
    p.add_argument("--program", required=True)
    p.add_argument("--bundle", required=True)
    p.set_defaults(func=cmd_answersets_via)
    return parser


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        status = args.func(args, out)
    except DomainError as exc:
        err.write(f"aspkr: error: {exc}\n")
        return EXIT_DOMAIN
    except AspKrError as exc:
        err.write(f"aspkr: error: {exc}\n")
        return EXIT_DOMAIN
    return EXIT_OK if status is None else status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
