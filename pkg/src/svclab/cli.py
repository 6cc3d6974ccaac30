"""Command-line entry point: ``svclab <subcommand> [flags]``.

Exit status is 0 iff the report contains no FAIL.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import centre_lab as cl
from . import groups as gr
from . import groupspec
from . import heisenberg as he
from . import runs
from . import words as wd
from .report import RunReport


def _group(args) -> gr.FiniteGroup:
    if not args.group:
        raise SystemExit("error: --group/--g is required")
    return groupspec.load(args.group)


def _eq_text(arg: str) -> str:
    path = Path(arg)
    if path.is_file():
        lines = [ln for ln in path.read_text().splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
        return " ".join(lines)
    return arg


def cmd_group(args) -> RunReport:
    return runs.group_report(_group(args))


def cmd_solve(args) -> RunReport:
    G = _group(args)
    domain = None if args.domain == "G" else runs.select_subgroup(G, args.h or "diagonal")
    return runs.solve_report(G, _eq_text(args.eq), domain=domain, convention=args.convention)


def cmd_verbal_closure(args) -> RunReport:
    G = _group(args)
    H = runs.select_subgroup(G, args.h)
    extra = [wd.parse(w, args.convention) for w in args.word or []]
    return runs.closure_report(G, H, args.smax, extra_words=extra, seed=args.seed)


def cmd_retract(args) -> RunReport:
    G = _group(args)
    return runs.retract_report(G, runs.select_subgroup(G, args.h))


def cmd_structure(args) -> RunReport:
    G = _group(args)
    C = runs.select_subgroup(G, args.h) if args.h else None
    N = runs.select_subgroup(G, args.N) if args.N else None
    return runs.structure_report(G, C=C, N=N, modules=args.modules)


def cmd_approx(args) -> RunReport:
    J = [int(x) for x in args.J.split(",")] if args.J else None
    rep, R = runs.approx_report(args.p, args.d, args.k, r=args.r, n=args.n, J=J, samples=args.samples, seed=args.seed)
    if args.export:
        Path(args.export).write_text(R.generator_text() + "\n")
    return rep


def cmd_centre_lab(args) -> RunReport:
    H = _group(args)
    N = runs.select_subgroup(H, args.N) if args.N else None
    rows = None
    if args.R_file:
        rows = cl.read_rows(Path(args.R_file).read_text())
    elif not args.paper:
        if args.t is None:
            raise SystemExit("error: give --t or --paper")
        d = len(cl.elementary_basis(_socle(H, N, args.p), args.p))
        rows = cl.sum_zero(args.t, d, args.p)
    return cl.run_pipeline(
        H, N=N, p=args.p, t=args.t, R_rows=rows, paper=args.paper, s_max=args.smax, samples=args.samples, seed=args.seed
    )


def _socle(H, N, p):
    N = H.whole() if N is None else N
    L = gr.centralizer(H, cl._centre_of(N))
    return gr.elementary_socle(gr.p_component(cl._centre_of(L), p), p)


def cmd_dihedral(args) -> RunReport:
    if not args.overgroup_spec:
        raise SystemExit("error: --overgroup-spec is required")
    G = groupspec.load(args.overgroup_spec)
    H = runs.select_subgroup(G, args.h or "diagonal")
    return runs.dihedral_report(G, H, args.n)


def cmd_heisenberg(args) -> RunReport:
    return he.word_report(args.word, args.arity, args.box, args.seed)


def cmd_paper_examples(args) -> RunReport:
    return runs.paper_examples(seed=args.seed)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--group", "--g", dest="group", help="group-spec JSON file")
    common.add_argument("--h", help="subgroup selector: whole, centre, trivial, diagonal[-name], or element words a,b")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=os.cpu_count() or 1, help="accepted for compatibility; runs are single-process")
    common.add_argument("--report", help="write the report to this path")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--convention", choices=(wd.LEFT_NORMED, wd.RIGHT_NORMED), default=wd.LEFT_NORMED, help="commutator convention")

    ap = argparse.ArgumentParser(prog="svclab", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("group", parents=[common], help="build and describe a group")
    p.set_defaults(func=cmd_group)

    p = sub.add_parser("solve", parents=[common], help="solve WORD = COEFF exhaustively")
    p.add_argument("--eq", required=True, help="equation text or a file containing it")
    p.add_argument("--domain", choices=("G", "H"), default="G")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verbal-closure", parents=[common], help="bounded verbal closedness of H in G")
    p.add_argument("--smax", type=int, default=2)
    p.add_argument("--word", action="append", help="extra word to test (repeatable)")
    p.set_defaults(func=cmd_verbal_closure)

    p = sub.add_parser("retract", parents=[common], help="search for a retraction G -> H")
    p.set_defaults(func=cmd_retract)

    p = sub.add_parser("structure", parents=[common], help="monolith, normal-subgroup and centre checks")
    p.add_argument("--N", help="normal subgroup selector for the centre check")
    p.add_argument("--modules", action="store_true", help="also run the module fixtures")
    p.set_defaults(func=cmd_structure)

    p = sub.add_parser("approx-lemma", parents=[common], help="build R and check its properties")
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--r", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--J", help="comma-separated 1-based indices for the projection check")
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--export", help="write R's generator rows to this file")
    p.set_defaults(func=cmd_approx)

    for name in ("centre-lab", "build-centre-counterexample"):
        p = sub.add_parser(name, parents=[common], help="fibered-product overgroup G = Q/R of H")
        p.add_argument("--N", help="normal subgroup selector (default whole group)")
        p.add_argument("--p", type=int, default=2)
        p.add_argument("--t", type=int)
        p.add_argument("--paper", action="store_true", help="t and R from the polynomial construction")
        p.add_argument("--R-file", dest="R_file", help="rows spanning R, one vector per line")
        p.add_argument("--smax", type=int, default=2)
        p.add_argument("--samples", type=int, default=1000)
        p.set_defaults(func=cmd_centre_lab)

    p = sub.add_parser("dihedral-analyze", parents=[common], help="dihedral subgroup of an overgroup")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--overgroup-spec", dest="overgroup_spec")
    p.set_defaults(func=cmd_dihedral)

    p = sub.add_parser("heisenberg-word", parents=[common], help="word map on UT3(Z)")
    p.add_argument("--word", required=True)
    p.add_argument("--arity", type=int)
    p.add_argument("--box", type=int, default=5)
    p.set_defaults(func=cmd_heisenberg)

    p = sub.add_parser("paper-examples", parents=[common], help="all worked examples")
    p.set_defaults(func=cmd_paper_examples)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rep = args.func(args)
    except (groupspec.SpecError, gr.GroupError, wd.WordSyntaxError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = rep.to_json() if args.format == "json" else rep.to_text()
    if args.report:
        Path(args.report).write_text(out + "\n")
    print(out)
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
