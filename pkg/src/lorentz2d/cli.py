"""Command-line front end.

Exit codes: 0 success, 1 a verification check failed, 2 usage or input error.
Reports go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import bclasses, embeddings, generators, hardy, norms, verify
from .grid import GridError, GridFunction2D, load_grid, save_grid
from .rearrange import rearrange_1d, rearrange_x, rearrange_xy, rearrange_y, rearrange_yx
from .weights import ProductWeight, parse_weight1d, parse_weight2d

log = logging.getLogger("lorentz2d")


class UsageError(Exception):
    pass


def _pair(text: str, kind=float) -> tuple:
    try:
        a, b = (kind(x) for x in text.split(","))
    except ValueError as exc:
        raise UsageError(f"expected two comma-separated numbers, got {text!r}") from exc
    return a, b


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad number list {text!r}") from exc


def _clean(obj):
    return verify._jsonable(obj)


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n")


def _load_input(args) -> GridFunction2D:
    if getattr(args, "example", None):
        return generators.build(args.example, args.N, args.p if args.p is not None else 1.0, args.rule)
    if getattr(args, "input", None):
        return load_grid(args.input)
    raise UsageError("give --input or --example")


# -- subcommands ---------------------------------------------------------------

MODES = {"yx": rearrange_yx, "xy": rearrange_xy, "y": rearrange_y, "x": rearrange_x}


def cmd_rearrange(args) -> int:
    f = _load_input(args)
    if args.mode == "1d":
        g = rearrange_1d(f.flatten())
        out = {"cell_width": g.cell_width, "values": g.values.tolist()}
        text = json.dumps(out) + "\n"
        if args.output:
            Path(args.output).write_text(text)
        else:
            sys.stdout.write(text)
        return 0
    g = MODES[args.mode](f)
    if args.output:
        save_grid(g, args.output)
    else:
        sys.stdout.write(json.dumps(g.to_dict()) + "\n")
    return 0


def _default_weights(args):
    # the separating examples use u = indicator of [0,1] in x and v = 1 in y
    if args.example in ("r25i", "r25ii"):
        return args.u or "indicator:1", args.v or "const:1"
    return args.u or "const:1", args.v or "const:1"


def cmd_norm(args) -> int:
    f = _load_input(args)
    p = args.p if args.p is not None else 1.0
    q = args.q if args.q is not None else p
    us, vs = _default_weights(args)
    u, v = parse_weight1d(us), parse_weight1d(vs)
    extra = {}
    if args.norm == "lambda":
        value = norms.lambda_norm(f, parse_weight1d(args.w or us), p)
    elif args.norm == "lambda2":
        w = parse_weight2d(args.w) if args.w else ProductWeight(u, v)
        value = norms.lambda2_norm(f, w, p)
    elif args.norm == "mixed":
        value = norms.mixed_norm(f, u, v, p, q, args.order)
    elif args.norm in ("star", "starstar"):
        if args.norm == "star" and not p >= 1:
            raise UsageError("the star norm needs p >= 1")
        op = "s21" if args.norm == "star" else "fstarstar"
        res = norms.operator_norm_estimate(op, f, u, v, p)
        value = res.value
        extra = {"refinement": res.refinement, "rel_change": res.rel_change, "converged": res.converged}
    elif args.norm == "weak":
        value = norms.weak_lp_norm(f, p)
    else:  # argparse restricts choices; kept for direct calls
        raise UsageError(f"unknown norm {args.norm!r}")
    if args.json:
        _emit({"norm": args.norm, "p": p, "q": q, "value": value, **extra})
    else:
        sys.stdout.write(f"{value!r}\n")
    return 0


def cmd_hardy(args) -> int:
    f = _load_input(args)
    if args.superlevel is not None:
        res = hardy.superlevel_measure(args.op, f, args.superlevel, box=_pair(args.box) if args.box else None)
        _emit(res.__dict__)
        return 0
    if args.weak_curve:
        lams = _floats(args.weak_curve)
        rows = ["lambda,lambda_times_measure,measure,exact"]
        for lam in lams:
            res = hardy.superlevel_measure(args.op, f, lam)
            meas = float(res.measure)
            rows.append(f"{lam!r},{lam * meas!r},{meas!r},{int(res.exact)}")
        sys.stdout.write("\n".join(rows) + "\n")
        return 0
    if args.points:
        pts = np.array([_pair(chunk) for chunk in args.points.split(";") if chunk.strip()])
    else:
        box = _pair(args.box) if args.box else f.box
        cells = _pair(args.query_cells, int) if args.query_cells else f.shape
        pts = hardy.query_midpoints(box, cells)
    sample = {"s2": hardy.s2, "fstarstar": hardy.fstarstar, "s21": hardy.s21}[args.op](f, pts)
    sys.stdout.write(sample.to_csv())
    return 0


def cmd_weight_check(args) -> int:
    box = _pair(args.box) if args.box else None
    cells = _pair(args.cells, int) if args.cells else None
    if args.mode in ("bp", "b1inf"):
        v = parse_weight1d(args.weight)
        if args.mode == "bp":
            if args.p is None:
                raise UsageError("--mode bp needs --p")
            verdict = bclasses.bp_constant(v, args.p)
        else:
            verdict = bclasses.b1inf_constant(v)
        _emit(verdict.to_dict())
        return 0
    w = parse_weight2d(args.weight)
    if args.mode == "b2p":
        verdict = bclasses.b2p_membership(w, args.p if args.p is not None else 1.0, box, cells, args.seed)
        _emit(verdict.to_dict())
        return 0
    if args.trend:
        rows = ["cells,staircase_sup,method"]
        for c in (int(x) for x in _floats(args.trend)):
            vd = bclasses.b21_staircase_sup(w, box=box, cells=(c, c), seed=args.seed)
            rows.append(f"{c},{float(vd.constant)!r},{vd.method}")
        sys.stdout.write("\n".join(rows) + "\n")
        return 0
    verdict = bclasses.b21_staircase_sup(w, box=box, cells=cells, seed=args.seed)
    _emit(verdict.to_dict())
    return 0


def cmd_embed(args) -> int:
    u, w = parse_weight1d(args.u), parse_weight2d(args.w)
    box, cells = _pair(args.box), _pair(args.cells, int)
    fn = embeddings.embed_const_forward if args.dir == "forward" else embeddings.embed_const_reverse
    rep = fn(u, w, args.p, args.q, box, cells, seed=args.seed)
    out = rep.to_dict()
    if args.trials and math.isfinite(rep.constant):
        chk = embeddings.embedding_inequality_check(
            args.dir, u, w, args.p, args.q, rep.constant, box, cells, trials=args.trials, seed=args.seed,
            maximizer=rep.maximizer,
        )
        out["check"] = chk.to_dict()
    _emit(out)
    return 0


def cmd_covering(args) -> int:
    fam = embeddings.CoveringFamily.from_json(args.family)
    u, w = parse_weight1d(args.u), parse_weight2d(args.w)
    if args.dir == "forward":
        a, b = embeddings.covering_functionals_jl1(fam, u, w, args.p, args.q)
        _emit({"I2": a, "I3": b, "members": len(fam.members)})
    else:
        a, b = embeddings.covering_functionals_jl2(fam, u, w, args.p, args.q)
        _emit({"J2": a, "J3": b, "members": len(fam.members)})
    return 0


def cmd_verify(args) -> int:
    results = verify.run_suite(args.scale, args.seed, args.threads)
    doc = verify.report_json(results, args.scale, args.seed, timings=args.timings)
    if args.output:
        Path(args.output).write_text(doc)
    if args.json:
        sys.stdout.write(doc)
    else:
        sys.stdout.write(verify.report_table(results))
    for r in results:
        if not r.passed:
            print(f"FAILED {r.id}: observed {r.observed}", file=sys.stderr)
    return 0 if all(r.passed for r in results) else 1


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    def globals_(default):
        g = argparse.ArgumentParser(add_help=False)
        keep = (lambda v: v) if default else (lambda v: argparse.SUPPRESS)
        g.add_argument("--seed", type=int, default=keep(0))
        g.add_argument("--threads", type=int, default=keep(1))
        g.add_argument("--json", action="store_true", default=keep(False), help="machine-readable output")
        return g

    # global flags work before or after the subcommand
    top, common = globals_(True), globals_(False)

    def source(p):
        p.add_argument("--input", help="grid JSON file")
        p.add_argument("--example", choices=generators.EXAMPLES)
        p.add_argument("--N", type=int, default=4)
        p.add_argument("--rule", choices=("harmonic", "geometric"))

    parser = argparse.ArgumentParser(prog="lorentz2d", parents=[top], description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rearrange", parents=[common], help="decreasing rearrangements")
    source(p)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--mode", choices=("yx", "xy", "y", "x", "1d"), default="yx")
    p.add_argument("--output")
    p.set_defaults(func=cmd_rearrange)

    p = sub.add_parser("norm", parents=[common], help="Lorentz-type norms")
    source(p)
    p.add_argument("--norm", required=True, choices=("lambda", "lambda2", "mixed", "star", "starstar", "weak"))
    p.add_argument("--p", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--u")
    p.add_argument("--v")
    p.add_argument("--w")
    p.add_argument("--order", choices=("y-then-x", "x-then-y"), default="y-then-x")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("hardy", parents=[common], help="averaging operators")
    source(p)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--op", choices=hardy.OPERATORS, default="s2")
    p.add_argument("--points", help="'s,t;s,t;...'")
    p.add_argument("--query-cells", help="m,n midpoint lattice")
    p.add_argument("--box", help="a,b")
    p.add_argument("--superlevel", type=float, help="lambda: measure of {op f > lambda}")
    p.add_argument("--weak-curve", help="comma-separated lambdas; CSV of lambda*measure")
    p.set_defaults(func=cmd_hardy)

    p = sub.add_parser("weight-check", parents=[common], help="weight-class constants")
    p.add_argument("--weight", required=True)
    p.add_argument("--p", type=float)
    p.add_argument("--mode", choices=("bp", "b1inf", "b2p", "b21-sup"), default="bp")
    p.add_argument("--box")
    p.add_argument("--cells")
    p.add_argument("--trend", help="comma-separated square cell counts; CSV of the staircase sup")
    p.set_defaults(func=cmd_weight_check)

    p = sub.add_parser("embed", parents=[common], help="embedding constants for p <= q")
    p.add_argument("--dir", choices=("forward", "reverse"), default="forward")
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--u", default="const:1")
    p.add_argument("--w", default="const:1")
    p.add_argument("--box", default="4,4")
    p.add_argument("--cells", default="4,4")
    p.add_argument("--trials", type=int, default=0)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("covering", parents=[common], help="covering-family functionals for p > q")
    p.add_argument("--family", required=True, help='JSON {"heights": [[...], ...]}')
    p.add_argument("--u", default="const:1")
    p.add_argument("--w", default="const:1")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--dir", choices=("forward", "reverse"), default="forward")
    p.set_defaults(func=cmd_covering)

    p = sub.add_parser("paper-verify", parents=[common], help="run the verification suite")
    p.add_argument("--scale", choices=("small", "full"), default="small")
    p.add_argument("--output", help="write the JSON report here")
    p.add_argument("--timings", action="store_true", help="include runtimes (breaks byte-identity)")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        return args.func(args)
    except (UsageError, GridError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
