"""Command-line entry point: ``disjocc {dist,verify,gallery,bounds,percolation}``.

Exit codes: 0 success, 1 assertion or verification failure, 2 usage or
parse error (including exceeded enumeration caps).
"""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import bounds as bnd
from . import gallery, percolation, verify
from .disjoint import X_distribution, Y_distribution, Z_distribution, domination_violations
from .errors import CapExceededError, DisjoccError, SpecFormatError
from .events import is_decreasing, is_increasing, probability
from .space import is_positively_associated
from .specfile import load_instance

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@contextlib.contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def dist_csv(dist) -> str:
    lines = ["value,pmf,survival,pmf_decimal,survival_decimal"]
    for v, (p, s) in enumerate(zip(dist.pmf, dist.survivals())):
        lines.append(f"{v},{p},{s},{float(p):.15g},{float(s):.15g}")
    return "\n".join(lines) + "\n"


def hypothesis_report(space, events) -> tuple[bool, list[str]]:
    notes = []
    inc = all(map(is_increasing, events))
    dec = all(map(is_decreasing, events))
    if inc:
        notes.append("events all increasing")
    elif dec:
        notes.append("events all decreasing")
    else:
        notes.append("events not all increasing (nor all decreasing)")
    pa = True
    for i, f in enumerate(space.factors, 1):
        try:
            ok = is_positively_associated(f)
        except CapExceededError:
            notes.append(f"factor {i}: PA not verified (too large)")
            pa = False
            continue
        if not ok:
            notes.append(f"factor {i} not positively associated")
            pa = False
    if pa:
        notes.append("all factors positively associated")
    return (inc or dec) and pa, notes


def cmd_dist(args) -> int:
    space_text = Path(args.space).read_text()
    events_text = Path(args.events).read_text() if args.events else None
    space, events = load_instance(space_text, events_text)
    xd = X_distribution(events, space)
    yd = Y_distribution([probability(e) for e in events])
    zd = Z_distribution(events)
    dominated = not domination_violations(xd, yd)
    hyp_ok, notes = hypothesis_report(space, events)
    blocks = {"X": dist_csv(xd), "Y": dist_csv(yd), "Z": dist_csv(zd)}
    if args.out in (None, "-"):
        for name, text in blocks.items():
            sys.stdout.write(f"# {name}\n{text}")
    else:
        for name, text in blocks.items():
            Path(f"{args.out}.{name}.csv").write_text(text)
    lam = sum((probability(e) for e in events), Fraction(0))
    print(f"# lambda = {lam}")
    print(f"# verdict: X dominated by Y: {str(dominated).lower()}; "
          f"theorem hypotheses verified: {str(hyp_ok).lower()} ({'; '.join(notes)})")
    if hyp_ok and not dominated:
        print("# ERROR: domination fails although the hypotheses hold", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_verify(args) -> int:
    results = verify.run_all(
        max_coords=args.max_coords,
        max_factor_size=args.max_factor_size,
        families=args.families,
        seed=args.seed,
        random_instances=args.random_instances,
        skip_pa_check=args.inject_mutant,
        log=lambda line: print(line, flush=True),
    )
    failed = [r for r in results if not r.passed]
    with _output(args.out) as fh:
        if args.out not in (None, "-"):
            for r in results:
                fh.write(r.line() + "\n")
        for r in failed:
            fh.write(f"# minimal counterexample for {r.name}\n")
            fh.write(json.dumps(r.counterexamples[0], indent=1) + "\n")
    print(f"{'FAIL' if failed else 'PASS'}: {len(results)} suites, {len(failed)} failed")
    return EXIT_FAIL if failed else EXIT_OK


def cmd_gallery(args) -> int:
    names = list(gallery.CASES) if args.name == "all" else [args.name]
    if any(n not in gallery.CASES for n in names):
        raise UsageError(f"unknown gallery case {args.name!r}; choose from all, {', '.join(gallery.CASES)}")
    ok = True
    with _output(args.out) as fh:
        for n in names:
            res = gallery.run_case(n)
            fh.write(res.render())
            ok &= res.passed
    return EXIT_OK if ok else EXIT_FAIL


def cmd_bounds(args) -> int:
    exact = Fraction(args.exact_tail) if args.exact_tail is not None else None
    header = "lambda,t,product,chernoff,bernstein" + (",exact_tail" if exact is not None else "")
    lines = [header]
    for lam in args.lam:
        for t in args.t:
            if lam < 0 or t < 0:
                raise UsageError("lambda and t must be nonnegative")
            rep = bnd.tail_report(lam, t, exact)
            prod = "" if rep.product is None else f"{rep.product:.15g}"
            row = f"{lam:.15g},{t:.15g},{prod},{rep.chernoff:.15g},{rep.bernstein:.15g}"
            if exact is not None:
                row += f",{float(exact):.15g}"
            lines.append(row)
    with _output(args.out) as fh:
        fh.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_percolation(args) -> int:
    try:
        graph = percolation.Graph.named(args.graph)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    pairs = percolation.parse_pairs(args.pairs) if args.pairs else _default_pairs(graph)
    try:
        p = Fraction(args.p)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad --p {args.p!r}") from None
    if not 0 <= p <= 1:
        raise UsageError("--p must lie in [0, 1]")
    try:
        percolation.check_pairs(graph, pairs)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = percolation.monte_carlo_tail(graph, pairs, p, args.samples, args.seed,
                                          workers=args.threads)
    with _output(args.out) as fh:
        fh.write(report.to_csv())
    bad = report.bound_violations()
    note = "exact" if report.lam_exact else "estimated"
    print(f"# lambda ({note}) = {report.lam:.15g}; rows above bound by 3 SE: {len(bad)}",
          file=sys.stderr)
    return EXIT_FAIL if bad else EXIT_OK


def _default_pairs(graph):
    # opposite corners of a grid, or first/last vertex otherwise
    return [(0, graph.n_vertices - 1)]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker processes (default: all cores)")

    parser = argparse.ArgumentParser(
        prog="disjocc", description="Exact disjoint-occurrence laws, tail bounds and verification suites.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dist", parents=[common], help="exact X, Y, Z distributions and domination verdict")
    p.add_argument("space", help="space JSON (may also hold 'events')")
    p.add_argument("events", nargs="?", help="events JSON (list or {'events': [...]})")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("verify", parents=[common], help="exhaustive and seeded verification suites")
    p.add_argument("--max-coords", type=int, default=3)
    p.add_argument("--max-factor-size", type=int, default=3)
    p.add_argument("--families", type=int, default=3, help="largest event family size")
    p.add_argument("--random-instances", type=int, default=2000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--inject-mutant", action="store_true",
                   help="skip the PA check and add a non-PA antichain factor (must fail)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gallery", parents=[common], help="recompute a worked example")
    p.add_argument("name", help=f"all, {', '.join(gallery.CASES)}")
    p.set_defaults(func=cmd_gallery)

    p = sub.add_parser("bounds", parents=[common], help="tail bound values as CSV")
    p.add_argument("--lambda", dest="lam", type=float, nargs="+", required=True)
    p.add_argument("--t", type=float, nargs="+", required=True)
    p.add_argument("--exact-tail", default=None, help="exact tail probability to report alongside")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("percolation", parents=[common], help="Monte Carlo tail of X for path events")
    p.add_argument("--graph", default="grid3x3", help="gridRxC, cycleN, pathN, completeN or file:<path>")
    p.add_argument("--pairs", default=None, help='1-based terminal pairs, e.g. "1-9,3-7"')
    p.add_argument("--p", default="0.5")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_percolation)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, SpecFormatError, CapExceededError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DisjoccError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
