"""Command-line front end.

Exit codes: 0 success, 1 domain error or failed check, 2 usage error.
Error lines start with USAGE:, IO:, DOMAIN: or BUDGET:.
"""

import argparse
import json
import math
import sys

from . import dendrograms, gh, interleaving, projections, spaces
from ._config import BudgetExceeded, PGHError
from .generators import GenConfig, generate
from .parith import INF, format_p, parse_p

DIGITS = 12


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def num(v):
    """Round to 12 significant digits for output; inf stays a string."""
    if v is None:
        return None
    v = float(v)
    if math.isinf(v):
        return "inf"
    return float(f"{v:.{DIGITS}g}")


def fmt(v) -> str:
    v = float(v)
    return "inf" if math.isinf(v) else f"{v:.{DIGITS}g}"


def p_arg(text):
    try:
        return parse_p(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _space_text(space):
    width = max(len(lab) for lab in space.labels)
    lines = []
    for lab, row in zip(space.labels, space.dist.tolist()):
        lines.append(lab.ljust(width) + "  " + " ".join(fmt(v) for v in row))
    return "\n".join(lines)


def _space_json(space):
    return {"labels": list(space.labels), "matrix": [[num(v) for v in row] for row in space.dist.tolist()]}


class Output:
    def __init__(self, fmt_name):
        self.json = fmt_name == "json"

    def emit(self, payload: dict, text: str):
        if self.json:
            print(json.dumps(payload))
        else:
            print(text)

    def space(self, space, extra=None):
        payload = _space_json(space)
        if extra:
            payload.update(extra)
        self.emit(payload, _space_text(space))


def _corr_payload(corr, X, Y):
    return [list(pair) for pair in corr.labelled(X, Y)]


# ------------------------------------------------------------ subcommands

def cmd_validate(args, out):
    space = spaces.load(args.file)
    res = spaces.validate(space, args.p)
    payload = {"valid": res.ok, "p": format_p(args.p)}
    if res.ok:
        out.emit(payload, f"valid {format_p(args.p)}-metric space ({len(space)} points)")
        return 0
    payload.update({"triple": list(res.triple), "slack": num(res.slack)})
    a, b, c = res.triple
    out.emit(payload, f"DOMAIN: {format_p(args.p)}-triangle violated at ({a}, {b}, {c}), slack {fmt(res.slack)}")
    return 1


def cmd_project(args, out):
    res = projections.project(spaces.load(args.file), args.p)
    out.space(res.space, {"collapsed": [list(b) for b in res.collapsed if len(b) > 1]})
    return 0


def cmd_snowflake(args, out):
    out.space(projections.snowflake(spaces.load(args.file), args.power))
    return 0


def cmd_quotient(args, out):
    space = spaces.load(args.file)
    dendrograms.require_ultrametric(space)
    out.space(dendrograms.closed_quotient(space, args.t))
    return 0


def cmd_dendrogram(args, out):
    if args.inverse:
        with open(args.file, encoding="utf-8") as fh:
            dend = dendrograms.Dendrogram.from_dict(json.load(fh))
        out.space(dendrograms.from_dendrogram(dend))
        return 0
    dend = dendrograms.to_dendrogram(spaces.load(args.file))
    data = dend.to_dict()
    lines = [f"leaves: {' '.join(dend.leaves)}"]
    for merge in data["merges"]:
        blocks = " | ".join(",".join(b) for b in merge["blocks"])
        lines.append(f"{fmt(merge['height'])}: {blocks}")
    out.emit(data, "\n".join(lines))
    return 0


def _report(out, rep, X, Y, witness):
    payload = {"method": rep.method}
    if rep.exact:
        payload["value"] = num(rep.value)
        text = fmt(rep.value)
    else:
        payload["lower"], payload["upper"] = num(rep.lower), num(rep.upper)
        text = f"[{fmt(rep.lower)}, {fmt(rep.upper)}]"
    if witness:
        w = {}
        if "level" in rep.witness:
            w["level"] = num(rep.witness["level"])
            text += f"\nlevel: {fmt(rep.witness['level'])}"
        if "correspondence" in rep.witness:
            pairs = _corr_payload(rep.witness["correspondence"], X, Y)
            w["correspondence"] = pairs
            text += "\ncorrespondence: " + " ".join(f"({a},{b})" for a, b in pairs)
        for key in ("diameter_lower", "diameter_upper", "spectrum_lower", "holder_upper"):
            if key in rep.witness:
                w[key] = num(rep.witness[key])
                text += f"\n{key}: {fmt(rep.witness[key])}"
        payload["witness"] = w
    out.emit(payload, text)
    return 0


def cmd_ugh(args, out):
    X, Y = spaces.load(args.a), spaces.load(args.b)
    return _report(out, gh.ugh_structural(X, Y, linear=args.linear), X, Y, args.witness)


def cmd_dghp(args, out):
    X, Y = spaces.load(args.a), spaces.load(args.b)
    if args.bounds:
        dgh = gh.dghp_exact(X, Y, 1.0).value if args.with_dgh else None
        rep = gh.dghp_bounds(X, Y, args.p, dgh=dgh)
    else:
        rep = gh.dghp_exact(X, Y, args.p)
    return _report(out, rep, X, Y, args.witness)


def cmd_interleave(args, out):
    X, Y = spaces.load(args.a), spaces.load(args.b)
    rep = interleaving.interleaving_distance(X, Y, args.p)
    payload = {"value": num(rep.value)}
    text = fmt(rep.value)
    if args.witness:
        phi = {X.labels[i]: Y.labels[j] for i, j in enumerate(rep.witness_phi)}
        psi = {Y.labels[j]: X.labels[i] for j, i in enumerate(rep.witness_psi)}
        payload["witness"] = {"phi": phi, "psi": psi}
        text += "\nphi: " + " ".join(f"{k}->{v}" for k, v in phi.items())
        text += "\npsi: " + " ".join(f"{k}->{v}" for k, v in psi.items())
    out.emit(payload, text)
    return 0


def cmd_hausdorff(args, out):
    space = spaces.load(args.file)
    A = [s for s in args.A.split(",") if s]
    B = [s for s in args.B.split(",") if s]
    for lab in A + B:
        space.index(lab)
    dendrograms.require_ultrametric(space)
    value = gh.hausdorff_ultra(space, A, B)
    out.emit({"value": num(value)}, fmt(value))
    return 0


def cmd_spectrum(args, out):
    space = spaces.load(args.file)
    vals = spaces.spectrum(space) if args.eps is None else spaces.spectrum_eps(space, args.eps)
    out.emit({"spectrum": [num(v) for v in vals]}, " ".join(fmt(v) for v in vals))
    return 0


def cmd_curvature(args, out):
    space = spaces.load(args.file)
    mats = sorted(spaces.curvature_set(space, args.n))
    payload = {"n": args.n, "size": len(mats), "matrices": [[[num(v) for v in row] for row in m] for m in mats]}
    text = [f"{len(mats)} distinct matrices of order {args.n}"]
    for m in mats:
        text.append("; ".join(" ".join(fmt(v) for v in row) for row in m))
    out.emit(payload, "\n".join(text))
    return 0


def cmd_generate(args, out):
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            cfg = GenConfig.from_json(fh.read())
    else:
        cfg = GenConfig(
            seed=args.seed, n_points=args.n, lo=args.lo, hi=args.hi,
            kind=args.kind, p=args.p, levels=args.levels,
        )
    out.space(generate(cfg))
    return 0


def cmd_selftest(args, out):
    from .selftest import run_selftest

    extra = [spaces.load(path) for path in args.fixture]
    results = run_selftest(seed=args.seed, cases=args.cases, fixtures=extra)
    failed = [r for r in results if r.failures]
    payload = {
        "seed": args.seed,
        "cases": args.cases,
        "properties": [{"name": r.name, "checked": r.checked, "failures": r.failures} for r in results],
        "ok": not failed,
    }
    lines = [f"{'FAIL' if r.failures else 'ok  '} {r.name}: {r.checked} checked, {r.failures} failed" for r in results]
    lines.append("all properties passed" if not failed else f"{len(failed)} properties failed")
    out.emit(payload, "\n".join(lines))
    return 1 if failed else 0


# ---------------------------------------------------------------- parser

def build_parser():
    parser = _Parser(prog="pgh", description="Gromov–Hausdorff type distances on finite p-metric spaces")
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=["text", "json"], default="text")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text, p_default=None):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.set_defaults(func=func)
        if p_default is not None:
            sp.add_argument("--p", type=p_arg, default=p_default, help="exponent: decimal >= 1 or 'inf'")
        return sp

    sp = add("validate", cmd_validate, "check the p-triangle inequality", p_default=1.0)
    sp.add_argument("file")
    sp = add("project", cmd_project, "project onto p-metric spaces", p_default=INF)
    sp.add_argument("file")
    sp = add("snowflake", cmd_snowflake, "raise all distances to a power")
    sp.add_argument("--power", type=float, required=True)
    sp.add_argument("file")
    sp = add("quotient", cmd_quotient, "t-closed quotient of an ultrametric space")
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("file")
    sp = add("dendrogram", cmd_dendrogram, "ultrametric space <-> dendrogram JSON")
    sp.add_argument("--inverse", action="store_true", help="read a dendrogram, print the space")
    sp.add_argument("file")
    for name, func, text in (("ugh", cmd_ugh, "ultrametric GH distance (structural)"),):
        sp = add(name, func, text)
        sp.add_argument("--witness", action="store_true")
        sp.add_argument("--linear", action="store_true", help="linear scan instead of binary search")
        sp.add_argument("a")
        sp.add_argument("b")
    sp = add("dghp", cmd_dghp, "p-Gromov–Hausdorff distance", p_default=1.0)
    sp.add_argument("--witness", action="store_true")
    sp.add_argument("--bounds", action="store_true", help="closed-form interval instead of enumeration")
    sp.add_argument("--with-dgh", action="store_true", help="with --bounds: also use the exact p=1 value")
    sp.add_argument("a")
    sp.add_argument("b")
    sp = add("interleave", cmd_interleave, "p-interleaving distance", p_default=1.0)
    sp.add_argument("--witness", action="store_true")
    sp.add_argument("a")
    sp.add_argument("b")
    sp = add("hausdorff", cmd_hausdorff, "Hausdorff distance of two subsets of an ultrametric space")
    sp.add_argument("--A", required=True, help="comma-separated labels")
    sp.add_argument("--B", required=True, help="comma-separated labels")
    sp.add_argument("file")
    sp = add("spectrum", cmd_spectrum, "distinct distance values")
    sp.add_argument("--eps", type=float, default=None, help="keep only values >= eps")
    sp.add_argument("file")
    sp = add("curvature", cmd_curvature, "curvature set of order n")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("file")
    sp = add("generate", cmd_generate, "seeded random space", p_default=2.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--n", type=int, default=4)
    sp.add_argument("--lo", type=float, default=1.0)
    sp.add_argument("--hi", type=float, default=10.0)
    sp.add_argument("--class", dest="kind", choices=["metric", "p_metric", "ultrametric"], default="metric")
    sp.add_argument("--levels", type=int, default=None)
    sp.add_argument("--config", help="GenConfig JSON file (overrides flags)")
    sp = add("selftest", cmd_selftest, "run the seeded property suites")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--cases", type=int, default=50)
    sp.add_argument("--fixture", action="append", default=[], help="extra space file to include")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"USAGE: {exc}", file=sys.stderr)
        return 2
    out = Output(args.format)
    try:
        return args.func(args, out)
    except BudgetExceeded as exc:
        print(f"BUDGET: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"IO: {exc}", file=sys.stderr)
        return 1
    except (PGHError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"DOMAIN: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
