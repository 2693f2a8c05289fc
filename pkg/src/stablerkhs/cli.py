"""Command-line front end.

Commands write CSV (default) or JSON lines.  Exit codes: 0 success,
1 verification failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import gram as gm
from . import kernels as kn
from . import lambda_bounds as lb
from . import sign_matrix as sm
from . import stability as st
from . import verification

DEFAULT_SEED = 0
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(v, exact: bool = False) -> str:
    if v is None:
        return ""
    if isinstance(v, Fraction):
        if exact:
            return f"{v.numerator}/{v.denominator}"
        try:
            return f"{float(v):.6g}"
        except OverflowError:
            return ""
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _json_value(v, exact):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}" if exact else float(v)
    return v


def _emit(rows: list[dict], fmt: str, out, exact: bool) -> None:
    if fmt == "json-lines":
        for r in rows:
            out.write(json.dumps({k: _json_value(v, exact) for k, v in r.items()}) + "\n")
        return
    if not rows:
        return
    w = csv.writer(out, lineterminator="\n")
    w.writerow(list(rows[0]))
    for r in rows:
        w.writerow([_fmt(v, exact) for v in r.values()])


def _positive(name, value, minimum=1):
    if value < minimum:
        raise UsageError(f"--{name} must be >= {minimum}")


def norms_rows(p_max: int) -> list[dict]:
    rows = []
    for p in range(1, p_max + 1):
        spec = sm.SignMatrixSpec(p)
        closed = sm.opnorm_inf1_closed(spec)
        rows.append({
            "p": p,
            "m": spec.m,
            "n": spec.n,
            "l1_entrywise": sm.entrywise_l1(spec),
            "opnorm_inf1": closed,
            "opnorm_inf1_asymptotic": sm.opnorm_inf1_asymptotic(spec).value,
            "ratio": Fraction(closed, sm.entrywise_l1(spec)),
        })
    return rows


def gram_rows(p_max: int) -> list[dict]:
    rows = []
    for p in range(1, p_max + 1):
        g = gm.GramSpec.from_p(p)
        r = gm.ratio(g)
        rows.append({
            "p": p,
            "n": g.n,
            "l1": gm.l1_closed(g),
            "opnorm_inf1": gm.opnorm_inf1_value(g),
            "ratio": r.exact,
            "asymptote": r.asymptote,
            "deviation": r.deviation,
        })
    return rows


def lambda_rows(k_max: int, budget: int, seed: int) -> list[dict]:
    rows = []
    for k in range(1, k_max + 1):
        rec = lb.lambda_upper_search(k, budget=budget, seed=seed)
        rows.append({
            "k": k,
            "upper_bound": rec.upper_bound,
            "method": rec.method.value,
            "family": rec.family,
            "params": ";".join(f"{a}={b}" for a, b in rec.params.items()),
        })
    return rows


def fig1_rows(p_max: int) -> list[dict]:
    return [
        {"p": r.p, "n": r.n, "fig1_bound": r.bound, "gram_ratio_exact": gm.ratio(gm.GramSpec.from_p(r.p)).exact}
        for r in lb.fig1_curve(p_max)
    ]


def _build_kernel(args):
    name = args.kernel
    if name not in kn.KERNELS:
        raise UsageError(f"unknown kernel {name!r}; available: {', '.join(kn.KERNELS)}")
    if name == "stable-spline":
        if not 0 < args.alpha < 1:
            raise UsageError("--alpha must lie in (0, 1)")
        return kn.stable_spline(args.alpha)
    if name == "constant":
        if not args.c > 0:
            raise UsageError("--c must be positive")
        c = int(args.c) if float(args.c).is_integer() else args.c
        return kn.constant_kernel(c)
    return kn.KERNELS[name](p_of_h=args.p_of_h)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stablerkhs", description=__doc__.splitlines()[0])
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--format", choices=["csv", "json-lines"], default="csv")
    common.add_argument("--exact", action="store_true", help="print rationals as num/den")
    common.add_argument("--output", default="-", help="output path (default: stdout)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", parents=[common], help="run every desk-scale check")
    v.add_argument("--fail-fast", action="store_true")

    for name, helptext in (("norms", "sign-matrix norms"), ("gram", "Gram-matrix norms and ratios"), ("fig1", "upper-bound curve")):
        c = sub.add_parser(name, parents=[common], help=helptext)
        c.add_argument("--p-max", type=int, default=10)

    lam = sub.add_parser("lambda", parents=[common], help="upper bounds on the PSD norm ratio")
    lam.add_argument("--k", type=int, default=6, help="largest matrix size")
    lam.add_argument("--budget", type=int, default=lb.DEFAULT_BUDGET)

    kp = sub.add_parser("kernel-probe", parents=[common], help="stability diagnostics for a kernel")
    kp.add_argument("kernel", help=f"one of: {', '.join(kn.KERNELS)}")
    kp.add_argument("--blocks", type=int, default=10)
    kp.add_argument("--T", type=int, default=200)
    kp.add_argument("--alpha", type=float, default=0.9)
    kp.add_argument("--c", type=float, default=1.0)
    kp.add_argument("--p-of-h", choices=sorted(kn.P_OF_H), default="h")
    return parser


def _run(args, out, err) -> int:
    if args.command == "verify":
        results = verification.run_checks(seed=args.seed, fail_fast=args.fail_fast, echo=lambda s: out.write(s + "\n"))
        failed = [c.label for c, ok, _ in results if not ok]
        if failed:
            err.write("verification failed: " + ", ".join(failed) + "\n")
            return EXIT_FAIL
        out.write(f"all {len(results)} checks passed\n")
        return EXIT_OK
    if args.command in ("norms", "gram", "fig1"):
        _positive("p-max", args.p_max)
        rows = {"norms": norms_rows, "gram": gram_rows, "fig1": fig1_rows}[args.command](args.p_max)
    elif args.command == "lambda":
        _positive("k", args.k)
        if args.k > lb.SEARCH_MAX_K:
            raise UsageError(f"--k must be <= {lb.SEARCH_MAX_K}")
        _positive("budget", args.budget, 0)
        rows = lambda_rows(args.k, args.budget, args.seed)
    else:
        _positive("blocks", args.blocks)
        _positive("T", args.T)
        k = _build_kernel(args)
        report = st.stability_report(k, T_max=args.T, blocks=args.blocks, seed=args.seed)
        d = report.to_dict(exact=args.exact)
        if args.format == "json-lines":
            out.write(json.dumps(d) + "\n")
        else:
            rows = []
            for series in ("l1_partial", "opnorm_partial"):
                rows += [{"series": series, "x": x, "value": v} for x, v in d[series]]
            for name, seq in d["witness_growth"].items():
                rows += [{"series": f"witness:{name}", "x": x, "value": v} for x, v in seq]
            rows.append({"series": "verdict", "x": "", "value": d["verdict"]})
            _emit(rows, "csv", out, args.exact)
        return EXIT_OK
    _emit(rows, args.format, out, args.exact)
    return EXIT_OK


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    buf = io.StringIO()
    try:
        code = _run(args, buf, stderr)
    except UsageError as exc:
        stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    text = buf.getvalue()
    if args.output == "-":
        stdout.write(text)
    else:
        try:
            with open(args.output, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            stderr.write(f"cannot write {args.output}: {exc}\n")
            return EXIT_USAGE
    return code


if __name__ == "__main__":
    sys.exit(main())
