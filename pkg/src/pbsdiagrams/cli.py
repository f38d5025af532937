"""``pbsdiag`` command-line interface.

Exit codes: 0 for success, equivalent, true or inconclusive; 1 for
not-equivalent, false or refuted; 2 for usage and input errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .diagram import DiagramError, TypeCheckError, congruent, typecheck
from .dsl import DslSyntaxError, parse, pretty
from .equiv import check_iso_witness, equiv, iso_refute_moments
from .io import (
    RecordError,
    choi_record,
    dump_record,
    matrix_to_literal,
    read_channel,
    read_channel_dir,
    read_matrix,
    verdict_record,
    write_channel,
    write_matrix,
)
from .linalg import DEFAULT_TOL
from .pathsem import format_table, path_table
from .qsem import SemanticsError, semantics_choi
from .synth import Inadmissible, parse_family, synthesize

EXIT_OK, EXIT_NO, EXIT_USAGE = 0, 1, 2


class InputError(Exception):
    pass


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _read_diagram(path: str, check: bool = True):
    try:
        return parse(_read_text(path), check=check)
    except DslSyntaxError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_typecheck(args) -> int:
    term = _read_diagram(args.diagram, check=False)
    try:
        t = typecheck(term)
    except TypeCheckError as exc:
        print(f"type error: {exc}")
        return EXIT_NO
    print(f"arity {t.arity}")
    print(f"alphabet {','.join(sorted(t.alphabet)) or '-'}")
    print(f"holes {t.holes}")
    return EXIT_OK


def cmd_paths(args) -> int:
    table = path_table(_read_diagram(args.diagram))
    _emit(format_table(table), args.output)
    return EXIT_OK


def cmd_synth(args) -> int:
    family = parse_family(_read_text(args.family), args.arity)
    try:
        term = synthesize(family, neg_free=args.neg_free)
    except Inadmissible as exc:
        print(f"inadmissible family: {exc}", file=sys.stderr)
        return EXIT_NO
    _emit(pretty(term) + "\n", args.output)
    return EXIT_OK


def cmd_congruent(args) -> int:
    same = congruent(_read_diagram(args.a), _read_diagram(args.b))
    print("true" if same else "false")
    return EXIT_OK if same else EXIT_NO


def cmd_choi(args) -> int:
    d = _read_diagram(args.diagram)
    g = read_channel_dir(args.channels) if args.channels else {}
    choi = semantics_choi(d, g, args.dim_h)
    dim_h = choi.in_dim // (2 * typecheck(d).arity)
    _emit(dump_record(choi_record(choi, typecheck(d).arity, dim_h)), args.output)
    return EXIT_OK


def _verdict(args):
    a, b = read_channel(args.a), read_channel(args.b)
    return a, b, equiv(args.level, a, b, tol=args.tol, seed=args.seed)


def cmd_equiv(args) -> int:
    _, _, v = _verdict(args)
    _emit(dump_record(verdict_record(v)), args.output)
    return EXIT_OK if v.equivalent else EXIT_NO


def cmd_distinguish(args) -> int:
    _, _, v = _verdict(args)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    (out / "verdict.json").write_text(dump_record(verdict_record(v)))
    if v.equivalent:
        print(f"equivalent at level {args.level}; no witness")
        return EXIT_OK
    w = v.witness
    (out / "context.pbs").write_text(pretty(w.context) + "\n")
    chans = out / "channels"
    chans.mkdir(exist_ok=True)
    for label, ch in w.assignment.items():
        write_channel(chans / f"{label}.chan", ch)
    write_matrix(out / "input.mat", w.input_operator)
    print(f"failed {','.join(v.failed_criteria)}; separation {w.separation:.17g}")
    return EXIT_NO


def cmd_iso_check(args) -> int:
    a, b = read_channel(args.a), read_channel(args.b)
    ok = check_iso_witness(a, b, read_matrix(args.witness), tol=args.tol)
    print("true" if ok else "false")
    return EXIT_OK if ok else EXIT_NO


def cmd_iso_refute(args) -> int:
    a, b = read_channel(args.a), read_channel(args.b)
    r = iso_refute_moments(a, b, args.kmax, tol=args.tol)
    rec = {"refuted": r.refuted, "k": r.k, "kmax": args.kmax}
    if r.refuted:
        rec["moment_a"] = matrix_to_literal(r.moment_a)
        rec["moment_b"] = matrix_to_literal(r.moment_b)
    _emit(dump_record(rec), args.output)
    return EXIT_NO if r.refuted else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS, help="numeric tolerance (default 1e-9)")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for randomised fallbacks")

    p = argparse.ArgumentParser(prog="pbsdiag", description="PBS-diagrams and purified channels")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--seed", type=int, default=0)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("typecheck", parents=[common], help="arity and alphabet of a diagram")
    s.add_argument("diagram")
    s.set_defaults(func=cmd_typecheck)

    s = sub.add_parser("paths", parents=[common], help="word-path table")
    s.add_argument("diagram")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_paths)

    s = sub.add_parser("synth", parents=[common], help="diagram realising a word family")
    s.add_argument("--family", required=True)
    s.add_argument("--neg-free", action="store_true")
    s.add_argument("--arity", type=int, help="arity when the family omits trailing positions")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("congruent", parents=[common], help="structural congruence")
    s.add_argument("a")
    s.add_argument("b")
    s.set_defaults(func=cmd_congruent)

    s = sub.add_parser("choi", parents=[common], help="Choi matrix of the quantum semantics")
    s.add_argument("diagram")
    s.add_argument("--channels", help="directory of <label>.chan files")
    s.add_argument("--dim-h", type=int, help="data dimension for gate-free diagrams")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_choi)

    for name, func, helptext in (
        ("equiv", cmd_equiv, "decide observational equivalence"),
        ("distinguish", cmd_distinguish, "write a distinguishing witness"),
    ):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("--level", type=int, choices=(0, 1, 2), required=True)
        s.add_argument("a")
        s.add_argument("b")
        s.add_argument("-o", "--output", required=name == "distinguish")
        s.set_defaults(func=func)

    s = sub.add_parser("iso-check", parents=[common], help="verify an iso-preorder witness")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--witness", required=True)
    s.set_defaults(func=cmd_iso_check)

    s = sub.add_parser("iso-refute", parents=[common], help="moment test against iso-equivalence")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--kmax", type=int, required=True)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_iso_refute)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, RecordError, DiagramError, SemanticsError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
