"""Command-line front end: every subcommand prints one JSON report to stdout.

Exit codes: 0 all assertions pass, 1 an assertion failed, 2 bad input,
3 a budget was exceeded.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .complimit import charval, limit_convergence
from . import core
from .core import Assignment, BoolFn, from_btt, named_fn, set_limits, to_btt
from .errors import BudgetExceeded, ParseError, PreconditionError
from .measures import MEASURES, global_measure, local, measure_id
from .surd import Surd
from .tree import Ensemble, compose_boolfn, iterate, parse_itree
from . import verify, zoo

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_BUDGET = 0, 1, 2, 3

log = logging.getLogger("boolcomp")


class CheckFailed(Exception):
    """Raised by a command whose report contains a failed assertion."""

    def __init__(self, report, first):
        super().__init__(first)
        self.report = report


def _plain(v):
    if isinstance(v, (Fraction, Surd, Assignment)):
        return str(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, (set, frozenset)):
        return sorted(v)
    if hasattr(v, "to_json"):
        return v.to_json()
    raise TypeError(f"cannot serialize {type(v).__name__}")


def load_fn(source: str, n: int | None, hashes: dict) -> BoolFn:
    """A .btt path, or ``named:<NAME>`` with ``--n``; an existing file wins."""
    path = Path(source)
    if path.is_file():
        text = path.read_text()
        f = from_btt(text, name=path.stem)
    elif source.startswith("named:"):
        try:
            f = named_fn(source[len("named:"):], n)
        except ValueError as e:
            raise ParseError(str(e)) from None
        text = to_btt(f)
    else:
        raise ParseError(f"{source!r} is neither a file nor named:<NAME>")
    hashes[source] = hashlib.sha256(text.encode()).hexdigest()
    return f


def _parse_input(text: str, arity: int) -> Assignment:
    a = Assignment.parse(text)
    if a.arity != arity:
        raise ParseError(f"input has {a.arity} bits, function has arity {arity}")
    return a


def cmd_measure(args, hashes):
    f = load_fn(args.fn, args.n, hashes)
    m = measure_id(args.measure)
    if args.input is not None:
        res = local(f, _parse_input(args.input, f.arity), m, args.M)
        return {"function": f.name, "arity": f.arity, "measure": m, **res.to_json()}
    sample = (args.sample, args.seed) if args.sample else None
    rep = global_measure(f, m, args.M, sample=sample)

    def cert(x):
        if m == "s":
            return None
        return local(f, x, m, args.M).to_json()["certificate"]

    return rep.to_json(with_certs=cert)


def cmd_compose(args, hashes):
    fns = [load_fn(s, args.n, hashes) for s in args.fn]
    if args.tree:
        try:
            tree = parse_itree(Path(args.tree).read_text())
        except OSError as e:
            raise ParseError(str(e)) from None
        if len(fns) != tree.depth:
            raise ParseError(f"tree has depth {tree.depth}; give one function per level")
        F = compose_boolfn(Ensemble(tree, {v: fns[len(v)] for v in tree.internal}))
    elif len(fns) == 1:
        F = iterate(fns[0], args.uniform)
    else:
        if args.uniform not in (None, len(fns)):
            raise ParseError("--uniform must equal the number of functions given")
        F = compose_boolfn(Ensemble.uniform(fns))
    text = to_btt(F)
    if args.out:
        Path(args.out).write_text(text)
    return {"arity": F.arity, "btt": None if args.out else text, "written": args.out,
            "sha256": hashlib.sha256(text.encode()).hexdigest()}


def cmd_charval(args, hashes):
    f = load_fn(args.fn, args.n, hashes)
    tol = Fraction(args.tol).limit_denominator(10**15)
    return charval(f, args.measure, tol).to_json()


def cmd_limit(args, hashes):
    f = load_fn(args.fn, args.n, hashes)
    out = limit_convergence(f, args.measure, args.kmax)
    for r in out["rows"]:
        if r.get("kind") == "budget":
            log.warning("k=%d skipped: exhaustive size over budget", r["k"])
    return out


def cmd_zoo(args, hashes):
    params = {k: getattr(args, k) for k in ("n", "k", "d", "s", "N", "seed", "g", "m")
              if getattr(args, k, None) is not None}
    c = zoo.build(args.kind, **params)
    rep = zoo.verify_construction(c)
    if args.btt_out:
        Path(args.btt_out).write_text(to_btt(c.fn))
        rep["written"] = args.btt_out
    hashes[f"zoo:{args.kind}"] = hashlib.sha256(to_btt(c.fn).encode()).hexdigest()
    if not rep["all_pass"]:
        first = next(r for r in rep["claims"] if r["status"] == "failed")
        raise CheckFailed(rep, f"claim failed: {first['claim']}")
    return rep


def cmd_verify(args, hashes):
    names = list(verify.SUITES) if args.suite == "all" else [args.suite]
    results = []
    for name in names:
        r = verify.run_suite(name)
        print(r.line(), file=sys.stderr)
        results.append(r.to_json())
    rep = {"suites": results, "all_pass": all(r["passed"] for r in results)}
    if not rep["all_pass"]:
        first = next(r for r in results if not r["passed"])
        raise CheckFailed(rep, f"suite {first['suite']} failed: {first['summary']}")
    return rep


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="boolcomp", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"boolcomp {__version__}")
    p.add_argument("--max-arity", type=int, default=None,
                   help="largest arity enumerated exhaustively (env BOOLCOMP_MAX_ARITY)")
    p.add_argument("--max-edges", type=int, default=None,
                   help="largest hypergraph built (env BOOLCOMP_MAX_EDGES)")
    p.add_argument("--threads", type=int, default=1, help="worker cap (work is currently sequential)")
    p.add_argument("--indent", type=int, default=None, help="pretty-print the JSON report")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def fn_args(sp, many=False):
        sp.add_argument("fn", nargs="+" if many else None, help=".btt file or named:<NAME>")
        sp.add_argument("--n", type=int, default=None, help="arity parameter for named functions")

    sp = sub.add_parser("measure", help="local or global complexity measure")
    fn_args(sp)
    sp.add_argument("--measure", required=True, help=", ".join(MEASURES))
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--input", help="binary string, index 0 rightmost")
    g.add_argument("--global", dest="glob", action="store_true", help="max over all inputs (default)")
    sp.add_argument("--M", type=int, default=None, help="fold for bsM")
    sp.add_argument("--sample", type=int, default=None, help="evaluate only this many seeded inputs")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(run=cmd_measure)

    sp = sub.add_parser("compose", help="compose functions into a .btt table")
    fn_args(sp, many=True)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--tree", help=".itree file; one function per level")
    g.add_argument("--uniform", type=int, help="depth of the uniform composition")
    sp.add_argument("-o", "--out", help="write the table here instead of the report")
    sp.set_defaults(run=cmd_compose)

    sp = sub.add_parser("charval", help="characteristic value (composition limit)")
    fn_args(sp)
    sp.add_argument("--measure", required=True, choices=["s", "C", "Cstar", "CStar"])
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.set_defaults(run=cmd_charval)

    sp = sub.add_parser("limit", help="convergence table of m(f^(k))^(1/k)")
    fn_args(sp)
    sp.add_argument("--measure", required=True)
    sp.add_argument("--kmax", type=int, default=3)
    sp.set_defaults(run=cmd_limit)

    sp = sub.add_parser("zoo", help="build and verify a separating construction")
    sp.add_argument("kind", choices=zoo.KINDS)
    for flag in ("--n", "--k", "--d", "--s", "--N", "--m"):
        sp.add_argument(flag, type=int, default=None)
    sp.add_argument("--g", default=None, help="inner function name for or_compose")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--btt-out", default=None, help="export the realized function")
    sp.set_defaults(run=cmd_zoo)

    sp = sub.add_parser("verify", help="run an acceptance suite")
    sp.add_argument("--suite", default="all", choices=["all", *verify.SUITES])
    sp.set_defaults(run=cmd_verify)
    return p


def _emit(report, indent):
    print(json.dumps(report, sort_keys=True, default=_plain, indent=indent))


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    if args.threads > 1:
        log.info("--threads=%d accepted; computations run sequentially", args.threads)

    hashes: dict = {}
    report = {"command": ["boolcomp", *argv], "version": __version__, "input_hashes": hashes}
    t = time.perf_counter()
    code = EXIT_OK
    saved = (core.LIMITS.max_arity, core.LIMITS.max_edges)
    try:
        set_limits(args.max_arity, args.max_edges)
        report["results"] = args.run(args, hashes)
    except CheckFailed as e:
        report["results"] = e.report
        report["failure"] = str(e)
        code = EXIT_FAIL
    except AssertionError as e:
        report["failure"] = str(e)
        code = EXIT_FAIL
    except (ParseError, PreconditionError, ValueError, KeyError) as e:
        report["error"] = f"{type(e).__name__}: {e}"
        code = EXIT_PARSE
    except BudgetExceeded as e:
        report["error"] = f"BudgetExceeded: {e}"
        code = EXIT_BUDGET
    finally:
        core.LIMITS.max_arity, core.LIMITS.max_edges = saved
    report["timing"] = {"seconds": round(time.perf_counter() - t, 3)}
    if code != EXIT_OK:
        print(report.get("failure") or report.get("error"), file=sys.stderr)
    _emit(report, args.indent)
    return code


if __name__ == "__main__":
    sys.exit(main())
