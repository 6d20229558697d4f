"""Command-line front end: check, eval, trace, and corpus runs."""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import opsem
from .checker import Definitions, check_file
from .corpus import load_manifest, run_corpus
from .surface import ParseError, parse_file_text, parse_term, print_term, read_sexprs

TRACE_PRINT_CAP = 10_000


def _fuel(args) -> int:
    if args.fuel is not None:
        return args.fuel
    env = os.environ.get("PTT_FUEL")
    return int(env) if env else opsem.DEFAULT_FUEL


def _load_defs(path: str) -> Definitions:
    from .checker import check_decl

    defs = Definitions()
    with open(path) as f:
        for d in parse_file_text(f.read()):
            r = check_decl(defs, d)
            if not r.ok:
                raise SystemExit(f"FAIL {r.name}: {r.message}")
    return defs


def _cmd_check(args) -> int:
    ok = True
    for path in args.files:
        try:
            results = check_file(path, Definitions())
        except ParseError as e:
            print(f"parse error in {path}: {e}", file=sys.stderr)
            return 2
        for r in results:
            if args.json:
                print(json.dumps({"file": path, "decl": r.name, "ok": r.ok,
                                  "line": r.line, "message": r.message},
                                 sort_keys=True))
            elif r.ok:
                print(f"OK {r.name}")
            else:
                print(f"FAIL {r.name}: {r.message}")
            ok = ok and r.ok
    return 0 if ok else 1


def _parse_entry(expr: str):
    sexprs = read_sexprs(expr)
    if len(sexprs) != 1:
        raise ParseError("expected exactly one expression")
    return parse_term(sexprs[0])


def _cmd_eval(args) -> int:
    defs = _load_defs(args.file) if args.file else Definitions()
    term = defs.resolve(_parse_entry(args.expr))
    try:
        value, _ = opsem.eval_term(term, fuel=_fuel(args))
    except opsem.EvalError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(print_term(value))
    return 0


def _cmd_trace(args) -> int:
    defs = _load_defs(args.file) if args.file else Definitions()
    term = defs.resolve(_parse_entry(args.expr))
    try:
        value, trace = opsem.eval_term(term, fuel=_fuel(args), trace=True)
    except opsem.EvalError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    for i, t in enumerate(trace.terms[:TRACE_PRINT_CAP]):
        print(f"{i:4d}  {print_term(t)}")
    if len(trace.terms) > TRACE_PRINT_CAP:
        print(f"... {len(trace.terms) - TRACE_PRINT_CAP} more steps elided")
    return 0


def _cmd_corpus(args) -> int:
    manifest = load_manifest(args.manifest)
    report = run_corpus(manifest, tier=args.tier)
    for f in report.files:
        n_ok = sum(r.ok for r in f.results)
        status = "OK" if f.ok else "FAIL"
        if args.json:
            print(json.dumps({
                "file": str(f.entry.path), "tier": f.entry.tier, "ok": f.ok,
                "decls": len(f.results), "passed": n_ok,
                "seconds": round(f.seconds, 3), "error": f.error,
            }, sort_keys=True))
        else:
            print(f"[{f.entry.tier}] {status} {f.entry.path} "
                  f"({n_ok}/{len(f.results)} decls, {f.seconds:.2f}s)")
            for r in f.results:
                if not r.ok:
                    print(f"    FAIL {r.name}: {r.message.splitlines()[0]}")
            if f.error:
                print(f"    error: {f.error}")
    return 0 if report.core_ok else 1


def main(argv: list[str] | None = None) -> int:
    top = argparse.ArgumentParser(prog="ptt", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="typecheck declaration files")
    p.add_argument("files", nargs="+")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("eval", help="evaluate an expression to a value")
    p.add_argument("file", nargs="?", help="declaration file providing definitions")
    p.add_argument("-e", "--expr", required=True)
    p.add_argument("--fuel", type=int, default=None)
    p.set_defaults(fn=_cmd_eval)

    p = sub.add_parser("trace", help="print a full reduction trace")
    p.add_argument("file", nargs="?")
    p.add_argument("-e", "--expr", required=True)
    p.add_argument("--fuel", type=int, default=None)
    p.set_defaults(fn=_cmd_trace)

    p = sub.add_parser("corpus", help="run a corpus manifest")
    p.add_argument("manifest")
    p.add_argument("--tier", choices=("core", "all"), default="core")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_corpus)

    args = top.parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
