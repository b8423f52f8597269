"""Command line entry point ``invbv``."""
import argparse
import json
import sys

from . import catalog, emit, verifier
from .catalog import IcKey
from .cegqi.loop import DEFAULT_BUDGET, cegqi_check
from .cegqi.preprocess import UnsupportedInput, to_problem
from .cegqi.select import CONFIGS
from .sexpr import ParseError
from .smtlib import parse
from .term import const_str, sort_str, symbol

EXIT_OK, EXIT_UNKNOWN, EXIT_USAGE = 0, 1, 2
_FLIP = {"sat": "unsat", "unsat": "sat"}


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def solve_text(text, config="k", budget=DEFAULT_BUDGET, backend="bitblast", seed=0, der=True):
    """``(answer, verdict, problem, script)`` for SMT-LIB source ``text``."""
    script = parse(text)
    problem = to_problem(script.formula(), der_enabled=der)
    verdict = cegqi_check(problem, config=config, budget=budget, backend=backend, seed=seed)
    answer = verdict.answer
    if problem.flip:
        answer = _FLIP.get(answer, answer)
    return answer, verdict, problem, script


def cmd_solve(args):
    try:
        answer, verdict, problem, script = solve_text(
            _read(args.file), args.config, args.max_inst, args.backend, args.seed, not args.no_der)
    except (ParseError, UnsupportedInput) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    print(answer)
    if args.print_model and answer == "sat" and not problem.flip:
        model = verdict.model or {}
        for name, v in script.decls.items():
            val = model.get(v, False if v.width == 0 else 0)
            text = ("true" if val else "false") if v.width == 0 else const_str(val, v.width)
            print(f"(define-fun {symbol(name)} () {sort_str(v.width)} {text})")
    if args.stats:
        for k, val in verdict.stats.items():
            print(f"{k}={val}", file=sys.stderr)
        if verdict.reason:
            print(f"reason={verdict.reason}", file=sys.stderr)
    return EXIT_OK if answer in ("sat", "unsat") else EXIT_UNKNOWN


def cmd_verify(args):
    try:
        entries = [IcKey.parse(e) for e in args.entry] if args.entry else None
        if entries:
            for k in entries:
                catalog.lookup(k)
    except (ValueError, LookupError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    widths = range(args.width_min, args.width_max + 1)
    reports = verifier.verify_all(widths, jobs=args.jobs, entries=entries, cap=args.cap)
    if args.format == "records":
        for r in reports:
            print(r.record())
    else:
        print(verifier.format_table(reports))
    return EXIT_OK if all(r.status != "refuted" for r in reports) else EXIT_UNKNOWN


def cmd_emit_verify(args):
    widths = [args.width] if args.width else range(1, 65)
    paths = emit.emit_verification_dir(args.out, widths)
    print(f"wrote {len(paths)} scripts to {args.out}")
    return EXIT_OK


def cmd_emit_sygus(args):
    paths = emit.emit_sygus_dir(args.out, grammar=args.grammar, w=args.width)
    print(f"wrote {len(paths)} problems to {args.out}")
    return EXIT_OK


def cmd_dump(args):
    for key in catalog.catalog_entries():
        if args.format == "records":
            print(json.dumps({"entry": str(key), "condition": catalog.describe(key, args.width)}))
        else:
            print(f"{str(key):<22} {catalog.describe(key, args.width)}")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="invbv", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="decide an SMT-LIB script over BV")
    s.add_argument("file", help="input script, or - for stdin")
    s.add_argument("--config", choices=CONFIGS, default="k",
                   help="instantiation selection: m model values, k choice terms, "
                        "s/b projected solved forms")
    s.add_argument("--max-inst", type=int, default=DEFAULT_BUDGET, help="instantiation budget")
    s.add_argument("--backend", default="bitblast", help="bitblast, enum or external:CMD")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--stats", action="store_true", help="print key=value statistics to stderr")
    s.add_argument("--print-model", action="store_true")
    s.add_argument("--no-der", action="store_true", help="skip destructive equality resolution")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify-ic", help="check catalog rows by exhaustive enumeration")
    v.add_argument("--width-min", type=int, default=1)
    v.add_argument("--width-max", type=int, default=6)
    v.add_argument("--entry", action="append", help="OP:SIDE:REL, may repeat")
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--cap", type=int, default=verifier.DEFAULT_CAP,
                   help="skip widths above this")
    v.add_argument("--format", choices=("table", "records"), default="table")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("emit-verify", help="write SMT-LIB equivalence checks for every row")
    e.add_argument("--out", required=True)
    e.add_argument("--width", type=int, help="single width (default 1..64)")
    e.set_defaults(func=cmd_emit_verify)

    g = sub.add_parser("emit-sygus", help="write the SyGuS condition synthesis problems")
    g.add_argument("--out", required=True)
    g.add_argument("--grammar", choices=tuple(emit.GRAMMARS), default="r")
    g.add_argument("--width", type=int, default=4)
    g.set_defaults(func=cmd_emit_sygus)

    d = sub.add_parser("dump-catalog", help="print every row's condition")
    d.add_argument("--width", type=int, default=4)
    d.add_argument("--format", choices=("table", "records"), default="table")
    d.set_defaults(func=cmd_dump)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    if args.command == "emit-verify" and args.width is not None and not 1 <= args.width <= 64:
        print("error: width must be in 1..64", file=sys.stderr)
        return EXIT_USAGE
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
