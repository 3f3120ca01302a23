"""Command-line front end: ``hypkernel <command> [flags]``.

Exit codes: 0 success, 1 domain or flag error, 2 accuracy error,
3 failed verification (a rejected ly-check or a failing verify suite).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import comparator as cmp
from .errors import AccuracyError, DomainError
from .even_kernel import DEFAULT_QUADRATURE, QuadratureSpec
from .geometry import Mixture, fd_oracle, lift, mixture_ly_expression, mixture_parts
from .harnack import (HarnackQuery, MultiplierCurve, harnack_along_curve, harnack_constant,
                      log_harnack_along_curve, log_harnack_constant)
from .kernel import eval_kernel
from .multiplier import MultiplierTriple, check_triple, ly_bound, sup_scan
from .poly_engine import build_P

EXIT_OK, EXIT_DOMAIN, EXIT_ACCURACY, EXIT_FAILED = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; 2 is reserved for accuracy errors here
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _num(x):
    """Shortest decimal that round-trips to the same double."""
    return repr(float(x))


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _text(record, indent=""):
    lines = []
    for k, v in record.items():
        if isinstance(v, dict):
            lines.append(f"{indent}{k}:")
            lines.append(_text(v, indent + "  "))
        elif isinstance(v, float):
            lines.append(f"{indent}{k}: {v:.12g}")
        else:
            lines.append(f"{indent}{k}: {v}")
    return "\n".join(lines)


def _csv(rows, header):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_num(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _emit(args, text):
    if not text.endswith("\n"):
        text += "\n"
    if args.output in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise DomainError(f"cannot write {args.output}: {exc}") from exc


def _emit_record(args, record, csv_header=None, csv_rows=None):
    fmt = args.format
    if fmt == "json":
        _emit(args, json.dumps(_jsonable(record), indent=2))
    elif fmt == "csv":
        if csv_header is None:
            flat = {k: v for k, v in record.items() if not isinstance(v, (dict, list))}
            csv_header, csv_rows = list(flat), [list(flat.values())]
        _emit(args, _csv(csv_rows, csv_header))
    else:
        _emit(args, _text(_jsonable(record)))


def _quad(args):
    if args.rel_tol is None and args.abs_tol is None:
        return DEFAULT_QUADRATURE
    return QuadratureSpec(
        rel_tol=args.rel_tol if args.rel_tol is not None else DEFAULT_QUADRATURE.rel_tol,
        abs_tol=args.abs_tol if args.abs_tol is not None else DEFAULT_QUADRATURE.abs_tol,
    )


def cmd_kernel(args):
    r = np.asarray(args.r, dtype=float)
    ev = eval_kernel(args.dim, args.t, r if r.size > 1 else float(r[0]), _quad(args))
    out = ev.as_dict()
    if args.format == "csv":
        rows = zip(np.atleast_1d(r), *(np.atleast_1d(out[k]) for k in ("value", "log_value", "dlog_dr", "dlog_dt")))
        _emit(args, _csv(([float(v) for v in row] for row in rows),
                         ["r", "value", "log_value", "dlog_dr", "dlog_dt"]))
        return EXIT_OK
    out["inputs"] = {"dim": args.dim, "t": args.t, "r": args.r if len(args.r) > 1 else args.r[0]}
    _emit_record(args, out)
    return EXIT_OK


def cmd_ly_check(args):
    triple = MultiplierTriple(args.t, args.beta, args.gamma)
    rep = check_triple(args.dim, triple, args.r_max, args.r_samples, args.kappa, _quad(args))
    out = rep.as_dict()
    out["bound"] = ly_bound(args.dim, args.beta, args.t, args.kappa)
    out["inputs"] = {"dim": args.dim, "t": args.t, "beta": args.beta, "gamma": args.gamma, "kappa": args.kappa}
    _emit_record(args, out)
    if rep.verdict == "inconclusive":
        return EXIT_ACCURACY
    return EXIT_OK if rep.verdict == "accepted" else EXIT_FAILED


def cmd_sup(args):
    r_star, g_star = sup_scan(args.dim, args.beta, args.t, args.r_max, args.r_samples, args.kappa, _quad(args))
    bound = ly_bound(args.dim, args.beta, args.t, args.kappa)
    out = {
        "argmax_r": r_star,
        "sup": g_star,
        "bound": bound,
        "ratio": g_star / bound,
        "inputs": {"dim": args.dim, "t": args.t, "beta": args.beta, "kappa": args.kappa},
    }
    _emit_record(args, out)
    return EXIT_OK


def _t_grid(args):
    if not (0 < args.t_min < args.t_max) or args.t_count < 2:
        raise DomainError("need 0 < --t-min < --t-max and --t-count >= 2")
    if args.spacing == "log":
        return np.geomspace(args.t_min, args.t_max, args.t_count)
    return np.linspace(args.t_min, args.t_max, args.t_count)


def cmd_compare(args):
    if args.at is not None:
        _emit(args, json.dumps(_jsonable(cmp.dominance_report(args.dim, args.k, args.at)), indent=2))
        return EXIT_OK
    ts = _t_grid(args)
    threads = args.threads or os.cpu_count() or 1
    if threads < 1:
        raise DomainError("--threads must be >= 1")
    with ThreadPoolExecutor(max_workers=threads) as pool:
        # map keeps input order, so output does not depend on scheduling
        rows = list(pool.map(lambda t: cmp.atlas_row(args.dim, args.k, float(t)), ts))
    header = cmp.ATLAS_HEADER.split(",")
    if args.format == "json":
        _emit(args, json.dumps([dict(zip(header, map(float, row))) for row in rows], indent=2))
    else:
        _emit(args, _csv(rows, header))
    return EXIT_OK


def cmd_intersect(args):
    if args.which == "tH":
        t = cmp.intersect_tH(args.dim, args.k)
        out = {"which": "tH", "t": t, "x": args.k * t, "residual": cmp._th_residual(args.k * t)}
    else:
        x = cmp.x_lx()
        out = {"which": "tLX", "t": x / args.k, "x": x, "residual": cmp._tlx_residual(x),
               "bracket": list(cmp.X_LX_BRACKET)}
    out["inputs"] = {"dim": args.dim, "k": args.k}
    _emit_record(args, out)
    return EXIT_OK


def cmd_harnack(args):
    q = HarnackQuery(args.dim, args.t1, args.t2, args.r)
    inputs = {"dim": args.dim, "t1": args.t1, "t2": args.t2, "r": args.r, "curve": args.curve}
    if args.curve == "sharp":
        log_bound = log_harnack_constant(q)
        bound = harnack_constant(q) if log_bound < 700 else math.inf
    else:
        k = args.k if args.k is not None else args.dim - 1
        if not k > 0:
            raise DomainError("the Li-Xu curve needs k > 0 (pass --k for dim 1)")
        fam = cmp.EstimateFamily("LiXu", args.dim, k)
        curve = MultiplierCurve.sample(lambda t: cmp.curves(fam, t)[0], lambda t: cmp.curves(fam, t)[1],
                                       args.t1, args.t2, panels=args.panels)
        log_bound = log_harnack_along_curve(curve, args.t1, args.t2, args.r)
        bound = harnack_along_curve(curve, args.t1, args.t2, args.r) if log_bound < 700 else math.inf
        inputs.update(k=k, panels=args.panels)
    _emit_record(args, {"bound": bound, "log_bound": log_bound, "inputs": inputs})
    return EXIT_OK


def _read_mixture(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read mixture file {path}: {exc}") from exc
    try:
        return Mixture.from_json(data)
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed mixture file {path}: {exc}") from exc


def cmd_superpose(args):
    mix = _read_mixture(args.input)
    if args.x is not None and args.spatial is not None:
        raise DomainError("give either --x or --spatial, not both")
    if args.x is not None:
        x = np.asarray(args.x, dtype=float)
    else:
        x = lift(args.spatial if args.spatial is not None else np.zeros(mix.n))
    if x.size != mix.n + 1:
        raise DomainError(f"evaluation point needs {mix.n + 1} coordinates")
    expr = mixture_ly_expression(mix, args.beta, args.t, x)
    grad_sq, dt = mixture_parts(mix, args.t, x)
    bound = ly_bound(mix.n, args.beta, args.t)
    out = {"expression": expr, "bound": bound, "within_bound": bool(expr <= bound * (1 + 1e-8)),
           "grad_sq": grad_sq, "dlog_dt": dt}
    if args.fd_step is not None:
        fg, ft = fd_oracle(mix, args.t, x, args.fd_step)
        out["fd"] = {"grad_sq": fg, "dlog_dt": ft}
    out["inputs"] = {"mixture": mix.to_json(), "t": args.t, "beta": args.beta, "x": x.tolist()}
    _emit_record(args, out)
    return EXIT_OK


def cmd_verify(args):
    from .verify import run_suites

    results = run_suites(args.suite)
    if args.format == "json":
        _emit(args, json.dumps([r.as_dict() for r in results], indent=2))
    else:
        lines = []
        for r in results:
            lines.append(r.line())
            if args.verbose:
                lines.extend(f"    {'ok ' if c.ok else 'BAD'} {c.label}  {c.detail}".rstrip() for c in r.checks)
        _emit(args, "\n".join(lines))
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


def cmd_ptable(args):
    _emit(args, build_P(args.m).dumps())
    return EXIT_OK


def _add_common(p, formats=("text", "json", "csv"), default="text"):
    p.add_argument("--format", choices=formats, default=default, help=f"output format (default {default})")
    p.add_argument("--output", "-o", default=None, help="output file (default stdout)")


def _add_quad(p):
    p.add_argument("--rel-tol", type=float, default=None,
                   help=f"even-dimension quadrature relative tolerance (default {DEFAULT_QUADRATURE.rel_tol:g})")
    p.add_argument("--abs-tol", type=float, default=None,
                   help=f"even-dimension quadrature tail tolerance (default {DEFAULT_QUADRATURE.abs_tol:g})")


def build_parser():
    parser = _Parser(prog="hypkernel", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("kernel", help="evaluate K_n(t, r) and its log-derivatives")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--r", type=float, nargs="+", required=True, help="one or more distances")
    _add_quad(p)
    _add_common(p)
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("ly-check", help="test a triple (t, beta, gamma) against the heat kernel")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--kappa", type=float, default=1.0, help="curvature is -kappa^2 (default 1)")
    p.add_argument("--r-max", type=float, default=None, help="scan range (default 50 + 4t max(1, beta/(1-beta)))")
    p.add_argument("--r-samples", type=int, default=64, help="points per scan segment (default 64)")
    _add_quad(p)
    _add_common(p)
    p.set_defaults(func=cmd_ly_check)

    p = sub.add_parser("sup", help="sup over r of beta (log K)_r^2 - (log K)_t")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--r-max", type=float, default=None)
    p.add_argument("--r-samples", type=int, default=64)
    _add_quad(p)
    _add_common(p)
    p.set_defaults(func=cmd_sup)

    p = sub.add_parser("compare", help="atlas of classical estimate curves (CSV) or a dominance report")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--k", type=float, default=1.0, help="Ricci lower bound -k (default 1)")
    p.add_argument("--t-min", type=float, default=0.01)
    p.add_argument("--t-max", type=float, default=100.0)
    p.add_argument("--t-count", type=int, default=100)
    p.add_argument("--spacing", choices=("log", "linear"), default="log")
    p.add_argument("--at", type=float, default=None, help="emit the JSON dominance report at this t instead")
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: all cores)")
    _add_common(p, formats=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("intersect", help="crossing times t_H or t_LX")
    p.add_argument("--which", choices=("tH", "tLX"), required=True)
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--dim", type=int, default=3, help="dimension (the crossings do not depend on it)")
    _add_common(p)
    p.set_defaults(func=cmd_intersect)

    p = sub.add_parser("harnack", help="Harnack constant C with u(x1, t1) <= C u(x2, t2)")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--t1", type=float, required=True)
    p.add_argument("--t2", type=float, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--curve", choices=("sharp", "lixu"), default="sharp",
                   help="closed form (sharp) or integrate the Li-Xu curve (lixu)")
    p.add_argument("--k", type=float, default=None, help="Ricci bound for --curve lixu (default dim - 1)")
    p.add_argument("--panels", type=int, default=512)
    _add_common(p, default="json")
    p.set_defaults(func=cmd_harnack)

    p = sub.add_parser("superpose", help="Li-Yau expression for a finite mixture of kernels")
    p.add_argument("--input", required=True, help='JSON file {"n": .., "centers": [[x0, ..], ..], "weights": [..]}')
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--x", type=float, nargs="+", default=None, help="hyperboloid coordinates x0 .. xn")
    p.add_argument("--spatial", type=float, nargs="+", default=None,
                   help="spatial coordinates x1 .. xn (x0 is recomputed); default the origin")
    p.add_argument("--fd-step", type=float, default=None, help="also report the finite-difference oracle")
    _add_common(p)
    p.set_defaults(func=cmd_superpose)

    p = sub.add_parser("verify", help="run the self-verification suites")
    p.add_argument("--suite", default="all", help="'all' or comma-separated suite numbers 1-12")
    p.add_argument("--verbose", "-v", action="store_true")
    _add_common(p, formats=("text", "json"))
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("ptable", help="dump the integer polynomial table P_{m,i} as JSON")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=cmd_ptable)
    return parser


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_DOMAIN
    except DomainError as exc:
        print(f"hypkernel: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except AccuracyError as exc:
        print(f"hypkernel: accuracy error: {exc}", file=sys.stderr)
        return EXIT_ACCURACY


def main():
    sys.exit(run())
