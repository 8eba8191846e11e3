"""Batch experiment runner.

Every subcommand writes a table (CSV or JSON) whose header embeds the
resolved configuration and the package version, so a run can be repeated
byte for byte. Exit status: 0 on success, 1 for invalid input or flags,
2 for numerical failure (a JSON diagnostic goes to stderr).
"""

import argparse
import csv
import io as _stdio
import json
import math
import sys
import warnings

import numpy as np

from . import __version__, kernels
from . import io as nio
from .decomp import k_domination_check, m1_solve, weak_l1_khintchine
from .errors import MaxIterExceeded, NCKError
from .factor import extract_factorization, symmetrize
from .ineq import power_theorem_suite, run_suite
from .profile import INF, k_exact_1_inf, k_proxy, lp_norm, profile_of, weak_lp
from .rowcol import GModel, OpSequence, c_profile, g_profile, r_profile
from .schurhorn import sweep

SUBCOMMANDS = ("kfunc", "gnorm", "decompose", "factorize", "counterexample", "ineq-suite",
               "khintchine-weak1", "power-suite")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; this package reserves 2 for numerics
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _float(text):
    t = text.strip().lower()
    if t in ("inf", "infinity", "oo"):
        return INF
    try:
        v = float(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if math.isnan(v):
        raise argparse.ArgumentTypeError("NaN is not allowed")
    return v


def _int_list(text):
    try:
        out = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}") from None
    if not out or min(out) < 1:
        raise argparse.ArgumentTypeError("need positive integers")
    return out


def _float_list(text):
    try:
        return [_float(s) for s in text.split(",") if s.strip()]
    except argparse.ArgumentTypeError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text!r}") from None


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if v is None:
        return ""
    return str(v)


def _jsonable(v):
    if isinstance(v, (np.floating,)):
        v = float(v)
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


def _config(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("func", "out", "format")}
    cfg["backend"] = kernels.BACKEND
    return {k: _jsonable(v) for k, v in cfg.items()}


def emit_table(args, columns, rows, meta=None):
    """Write ``rows`` (a list of dicts) as CSV with a ``#`` header, or as JSON."""
    cfg = _config(args)
    meta = dict(meta or {})
    if args.format == "json":
        obj = {"ncklab_version": __version__, "command": args.command, "config": cfg,
               "meta": {k: _jsonable(v) for k, v in meta.items()}, "columns": columns,
               "rows": [{c: _jsonable(r.get(c)) for c in columns} for r in rows]}
        nio.write_json(obj, args.out)
        return
    buf = _stdio.StringIO()
    buf.write(f"# ncklab {__version__}\n")
    buf.write(f"# command: {args.command}\n")
    buf.write(f"# config: {json.dumps(cfg, sort_keys=True)}\n")
    for k, v in meta.items():
        buf.write(f"# {k}: {json.dumps(_jsonable(v))}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in columns])
    text = buf.getvalue()
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)


def _t_grid(args):
    if args.t:
        return np.asarray(args.t, dtype=float)
    return np.geomspace(args.t_min, args.t_max, args.t_count)


def cmd_kfunc(args):
    obj = nio.load_file(args.input)
    kind = nio.detect(obj)
    if kind == "profile":
        f = nio.profile_from_obj(obj)
    elif kind == "matrix":
        f = profile_of(nio.matrix_from_obj(obj), args.weight)
    else:
        raise nio.MalformedInput("kfunc takes a matrix or a profile, not a sequence")
    if not 0 < args.p < args.q:
        raise UsageError("kfunc: need 0 < p < q")
    exact = args.p == 1.0 and args.q == INF
    rows = []
    for t in _t_grid(args):
        K = k_exact_1_inf(f, t) if exact else k_proxy(f, args.p, args.q, t)
        rows.append({"t": float(t), "K": K, "exact": exact})
    emit_table(args, ["t", "K", "exact"], rows, {"input_kind": kind})


def cmd_gnorm(args):
    x = nio.read_sequence(args.input)
    model = GModel.parse(args.model, args.seed)
    g = g_profile(x, model)
    r, c = r_profile(x), c_profile(x)
    row = {"model": model.label, "surrogate": model.surrogate, "p": args.p,
           "g_norm": lp_norm(g, args.p), "r_norm": lp_norm(r, args.p),
           "c_norm": lp_norm(c, args.p), "N": x.N, "dim": x.dim}
    if args.p != INF:
        row.update(g_weak=weak_lp(g, args.p), r_weak=weak_lp(r, args.p), c_weak=weak_lp(c, args.p))
    cols = ["model", "surrogate", "N", "dim", "p", "g_norm", "r_norm", "c_norm",
            "g_weak", "r_weak", "c_weak"]
    emit_table(args, cols, [row])


def _solve(args, x):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", MaxIterExceeded)
        res = m1_solve(x, tol=args.tol, max_iter=args.max_iter)
    return res, [str(w.message) for w in caught if issubclass(w.category, MaxIterExceeded)]


def _dec_obj(res, warns):
    return {"y": nio.opseq_to_obj(res.y), "z": nio.opseq_to_obj(res.z),
            "u": nio.opseq_to_obj(res.u) if res.u is not None else None,
            "primal": res.primal, "dual_bound": res.dual_bound, "gap": res.gap,
            "relative_gap": res.relative_gap, "iterations": res.iterations,
            "converged": res.converged, "stop_reason": res.stop_reason,
            "tol": res.tol, "max_iter": res.max_iter, "warnings": warns}


def _result_doc(args, body):
    return {"ncklab_version": __version__, "command": args.command, "config": _config(args),
            **body}


def cmd_decompose(args):
    x = nio.read_sequence(args.input)
    res, warns = _solve(args, x)
    if args.format == "csv":
        emit_table(args, ["primal", "dual_bound", "gap", "iterations", "converged", "tol",
                          "max_iter"],
                   [{"primal": res.primal, "dual_bound": res.dual_bound, "gap": res.gap,
                     "iterations": res.iterations, "converged": res.converged,
                     "tol": res.tol, "max_iter": res.max_iter}])
        return
    nio.write_json(_result_doc(args, _dec_obj(res, warns)), args.out)


def cmd_factorize(args):
    x = nio.read_sequence(args.input)
    res, warns = _solve(args, x)
    if args.selfadjoint:
        res = symmetrize(x, res)
    fac = extract_factorization(x, res, args.rank_tol)
    resid = {"r_factor": fac.r_factor, "r_consistency": fac.r_consistency, "r_row": fac.r_row,
             "r_col": fac.r_col, "r_y": fac.r_y, "r_z": fac.r_z}
    if args.format == "csv":
        row = dict(resid, gap=res.gap, tol=res.tol, rank_tol=fac.rank_tol)
        emit_table(args, list(row), [row])
        return
    body = {"alpha": nio.matrix_to_obj(fac.alpha), "beta": nio.matrix_to_obj(fac.beta),
            "u": nio.opseq_to_obj(fac.u), "residuals": resid, "rank_tol": fac.rank_tol,
            "selfadjoint": args.selfadjoint,
            "decomposition": {k: v for k, v in _dec_obj(res, warns).items()
                              if k not in ("y", "z", "u")}}
    nio.write_json(_result_doc(args, body), args.out)


def cmd_counterexample(args):
    Ns = args.sweep if args.sweep else [args.n]
    reps = sweep(args.family, Ns, args.verify_cap)
    cols = ["N", "family", "size", "g_weak2", "r_weak2", "c_weak2", "ratio", "verified",
            "diag_error", "spectrum_error"]
    emit_table(args, cols, [r.row() for r in reps], {"model": "any unitary family"})


def cmd_ineq_suite(args):
    reps = run_suite(args.trials, args.seed, args.d_max)
    rows = []
    for item, rs in reps.items():
        for k, r in enumerate(rs):
            rows.append({"item": item, "trial": k, "dim": r.witnesses[0].shape[0],
                         "param": r.params.get("alpha", r.params.get("theta")),
                         "violation": r.violation, "contraction_excess": r.contraction_excess,
                         "isometry_defect": r.isometry_defect, "ok": r.ok()})
    cols = ["item", "trial", "dim", "param", "violation", "contraction_excess",
            "isometry_defect", "ok"]
    emit_table(args, cols, rows)


def _random_instances(count, seed, d_max, n_max):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        d = int(rng.integers(1, d_max + 1))
        N = int(rng.integers(1, n_max + 1))
        out.append(OpSequence(rng.standard_normal((N, d, d)) + 1j * rng.standard_normal((N, d, d))))
    return out


def cmd_khintchine_weak1(args):
    xs = [nio.read_sequence(args.input)] if args.input else \
        _random_instances(args.count, args.seed, args.d_max, args.n_max)
    rows = []
    for k, x in enumerate(xs):
        res, _ = _solve(args, x)
        rep = weak_l1_khintchine(x, res)
        dom = k_domination_check(x, res)
        rows.append({"instance": k, "N": x.N, "dim": x.dim, "g_weak1": rep["g_weak1"],
                     "decomp_weak1": rep["decomp_weak1"], "ratio": rep["ratio"],
                     "m1": res.primal, "gap": res.gap, "k_sup_row": dom["sup_row"],
                     "k_sup_col": dom["sup_col"], "model": rep["model"], "tol": res.tol})
    cols = ["instance", "N", "dim", "g_weak1", "decomp_weak1", "ratio", "m1", "gap",
            "k_sup_row", "k_sup_col", "model", "tol"]
    emit_table(args, cols, rows, {"model": "rademacher"})


def cmd_power_suite(args):
    rep = power_theorem_suite(args.seed, args.trials)
    cols = ["trial", "p", "q", "alpha", "min", "max", "c_p_alpha", "bounded", "in_envelope"]
    emit_table(args, cols, rep["rows"], {"all_bounded": rep["all_bounded"],
                                         "all_in_envelope": rep["all_in_envelope"]})


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ncklab", description="Noncommutative Khintchine laboratory.")
    p.add_argument("--version", action="version", version=f"ncklab {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("--out", default="-", help="output path (default: stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        return sp

    sp = add("kfunc", cmd_kfunc, "K-functional of a matrix or profile on a t-grid")
    sp.add_argument("--input", required=True)
    sp.add_argument("--p", type=_float, default=1.0)
    sp.add_argument("--q", type=_float, default=INF)
    sp.add_argument("--weight", type=_float, default=1.0)
    sp.add_argument("--t", type=_float_list, default=None, help="explicit comma-separated t values")
    sp.add_argument("--t-min", type=_float, default=1e-2)
    sp.add_argument("--t-max", type=_float, default=1e2)
    sp.add_argument("--t-count", type=int, default=41)

    sp = add("gnorm", cmd_gnorm, "norms of Gx, Rx and Cx")
    sp.add_argument("--input", required=True)
    sp.add_argument("--model", default="rademacher", help="rademacher or haar:D")
    sp.add_argument("--p", type=_float, default=1.0)
    sp.add_argument("--seed", type=int, default=0)

    for name, func, help_ in (("decompose", cmd_decompose, "optimal row + column decomposition"),
                              ("factorize", cmd_factorize, "x = alpha u + u beta")):
        sp = add(name, func, help_)
        sp.set_defaults(format="json")
        sp.add_argument("--input", required=True)
        sp.add_argument("--tol", type=_float, default=1e-7)
        sp.add_argument("--max-iter", type=int, default=5000)
        if name == "factorize":
            sp.add_argument("--selfadjoint", action="store_true")
            sp.add_argument("--rank-tol", type=_float, default=1e-8)

    sp = add("counterexample", cmd_counterexample, "weak-L2 separation families")
    sp.add_argument("--family", type=int, choices=(1, 2), required=True)
    sp.add_argument("--n", type=int, default=16)
    sp.add_argument("--sweep", type=_int_list, default=None)
    sp.add_argument("--verify-cap", type=int, default=512)

    sp = add("ineq-suite", cmd_ineq_suite, "randomised operator-inequality witnesses")
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--seed", type=int, default=7)
    sp.add_argument("--d-max", type=int, default=8)

    sp = add("khintchine-weak1", cmd_khintchine_weak1, "weak-L1 Khintchine and K-domination")
    sp.add_argument("--input", default=None)
    sp.add_argument("--count", type=int, default=50)
    sp.add_argument("--seed", type=int, default=11)
    sp.add_argument("--d-max", type=int, default=4)
    sp.add_argument("--n-max", type=int, default=6)
    sp.add_argument("--tol", type=_float, default=1e-7)
    sp.add_argument("--max-iter", type=int, default=5000)

    sp = add("power-suite", cmd_power_suite, "power-theorem ratio table")
    sp.add_argument("--seed", type=int, default=7)
    sp.add_argument("--trials", type=int, default=50)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv:
        parser.print_usage(sys.stderr)
        return 1
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except ArithmeticError as exc:
        diag = {"error": type(exc).__name__, "message": str(exc), "command": args.command,
                "config": _config(args)}
        print(json.dumps(diag), file=sys.stderr)
        return 2
    except (NCKError, ValueError) as exc:
        print(f"ncklab {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
