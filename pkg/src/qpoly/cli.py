"""Command-line frontend.

Subcommands
    eval     evaluate gamma_q / psi_q / psi_q_m / F / G / F_deriv / G_deriv
    certify  run a coefficient-positivity sweep (series), a grid falsifier, or both
    verify   run the exact lemma verifiers (2.1 | proof-steps | power-sums | ratio | weights)
    props    bundled analytic property checks (ratio sweep, concavity signs, weight monotonicity)

Exit codes: 0 success/certified, 1 violated, 2 bad flags, 3 evaluation error
(domain / non-convergence), 4 inconclusive (outside the proven regimes).

A plain key=value config file (--config) may preset the budget keys rel_tol,
digits and max_terms; QPOLY_PRECISION_DIGITS overrides the default digits;
command-line flags override both.  Reports embed the fully resolved
configuration and serialise deterministically.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from mpmath import mp

from . import analysis_props, combinatorics, functionals, qspecial, series_cm
from .errors import DomainError, NonConvergence
from .functionals import FDStep, IndexQuad
from .qspecial import PrecisionBudget, QPoint
from .series_cm import CertStatus, CoeffTarget

EXIT_OK = 0
EXIT_VIOLATED = 1
EXIT_USAGE = 2
EXIT_EVAL = 3
EXIT_INCONCLUSIVE = 4

ENV_DIGITS = "QPOLY_PRECISION_DIGITS"


class UsageError(Exception):
    pass


def _read_config_file(path: str) -> dict:
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{line_no}: expected key=value, got {raw.rstrip()!r}")
            key, _, value = line.partition("=")
            out[key.strip()] = value.strip()
    return out


def _resolve_budget(args) -> PrecisionBudget:
    """defaults < QPOLY_PRECISION_DIGITS < config file < explicit flags."""
    rel_tol = PrecisionBudget.rel_tol
    digits = PrecisionBudget.digits
    max_terms = PrecisionBudget.max_terms
    env_digits = os.environ.get(ENV_DIGITS)
    if env_digits is not None:
        try:
            digits = int(env_digits)
        except ValueError:
            raise UsageError(f"{ENV_DIGITS} must be an integer, got {env_digits!r}")
    if args.config:
        cfg = _read_config_file(args.config)
        try:
            if "rel_tol" in cfg:
                rel_tol = float(cfg["rel_tol"])
            if "digits" in cfg:
                digits = int(cfg["digits"])
            if "max_terms" in cfg:
                max_terms = int(cfg["max_terms"])
        except ValueError as exc:
            raise UsageError(f"bad value in config file: {exc}")
        unknown = set(cfg) - {"rel_tol", "digits", "max_terms"}
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
    if args.rel_tol is not None:
        rel_tol = args.rel_tol
    if args.digits is not None:
        digits = args.digits
    if args.max_terms is not None:
        max_terms = args.max_terms
    try:
        return PrecisionBudget(rel_tol=rel_tol, digits=digits, max_terms=max_terms)
    except DomainError as exc:
        raise UsageError(str(exc))


def _budget_dict(b: PrecisionBudget) -> dict:
    return {"rel_tol": b.rel_tol, "digits": b.digits, "max_terms": b.max_terms}


def _emit(text: str, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _require(cond: bool, message: str):
    if not cond:
        raise UsageError(message)


def _hp(value, digits: int = 30) -> str:
    # value is usually an mpf carrying its own precision; format it directly
    # (re-creating it under the ambient context would round to 15 digits)
    return mp.nstr(value, digits)


# ---------------------------------------------------------------- eval


def cmd_eval(args) -> int:
    budget = _resolve_budget(args)
    fn = args.fn
    result = {"fn": fn}

    def point():
        _require(args.q is not None and args.x is not None, f"--fn {fn} needs --q and --x")
        return QPoint(args.q, args.x)

    if fn == "gamma_q":
        sv = qspecial.gamma_q(point(), budget)
        result.update(value=float(sv.value), value_hp=_hp(sv.value), tail_bound=float(sv.tail_bound), terms_used=sv.terms_used)
    elif fn == "psi_q":
        p = point()
        sv = qspecial.psi_q(p, budget)
        with mp.workdps(qspecial.working_dps(budget)):
            q_recip = 1 / mp.mpf(p.q)
        mirror = qspecial.psi_q(QPoint(q_recip, p.x), budget)
        with mp.workdps(qspecial.working_dps(budget)):
            residual = abs(sv.value - (mp.mpf(p.x) - mp.mpf(3) / 2) * mp.log(mp.mpf(p.q)) - mirror.value)
        result.update(
            value=float(sv.value),
            value_hp=_hp(sv.value),
            tail_bound=float(sv.tail_bound),
            terms_used=sv.terms_used,
            reflection_residual=float(residual),
        )
    elif fn == "psi_q_m":
        _require(args.m is not None, "--fn psi_q_m needs --m")
        p = point()
        sv = qspecial.psi_q_deriv(p, args.m, budget)
        with mp.workdps(qspecial.working_dps(budget)):
            q_recip = 1 / mp.mpf(p.q)
        mirror = qspecial.psi_q_deriv(QPoint(q_recip, p.x), args.m, budget)
        with mp.workdps(qspecial.working_dps(budget)):
            delta = mp.log(mp.mpf(max(p.q, 1 / p.q))) if args.m == 1 else mp.mpf(0)
            residual = abs(abs(sv.value - mirror.value) - delta)
        result.update(
            value=float(sv.value),
            value_hp=_hp(sv.value),
            tail_bound=float(sv.tail_bound),
            terms_used=sv.terms_used,
            reflection_residual=float(residual),
        )
    elif fn in ("F", "F_deriv"):
        _require(None not in (args.r, args.m, args.n, args.s), f"--fn {fn} needs --r --m --n --s")
        idx = IndexQuad(args.r, args.m, args.n, args.s)
        p = point()
        if fn == "F":
            _require(args.c is not None, "--fn F needs --c")
            value = functionals.F_q_fd(idx, p, FDStep(args.c), budget)
        else:
            value = functionals.F_q_deriv(idx, p, budget)
        result.update(value=float(value), value_hp=_hp(value))
    elif fn in ("G", "G_deriv"):
        _require(args.m is not None, f"--fn {fn} needs --m")
        p = point()
        if fn == "G":
            _require(args.c is not None, "--fn G needs --c")
            value = functionals.G_q_fd(args.m, p, FDStep(args.c), budget)
        else:
            value = functionals.G_q_deriv(args.m, p, budget)
        result.update(value=float(value), value_hp=_hp(value))
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown --fn {fn}")

    payload = {"config": {"command": "eval", "budget": _budget_dict(budget), "flags": _flag_dict(args)}, "result": result}
    if args.format == "json":
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    elif args.format == "text":
        lines = [f"{k} = {v}" for k, v in result.items()]
        _emit("\n".join(lines) + "\n", args.out)
    else:
        raise UsageError("eval supports --format json or text")
    return EXIT_OK


# ---------------------------------------------------------------- certify


def _flag_dict(args) -> dict:
    skip = {"func", "config", "out", "format"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def cmd_certify(args) -> int:
    budget = _resolve_budget(args)
    _require(args.q is not None and args.c is not None, "certify needs --q and --c")
    if args.target == "G":
        _require(args.m is not None, "certify --target G needs --m")
        target = CoeffTarget(kind="G", q=args.q, c=args.c, m=args.m)
    else:
        _require(None not in (args.r, args.m, args.n, args.s), "certify --target F needs --r --m --n --s")
        target = CoeffTarget(kind="F", q=args.q, c=args.c, quad=IndexQuad(args.r, args.m, args.n, args.s))

    reports = []
    margins_rows = None
    if args.method in ("series", "both"):
        report = series_cm.certify_cm_series(target, args.k_max, budget, abs_slack=args.abs_slack)
        reports.append(report)
        if args.format == "csv":
            # replay the sweep to list per-index coefficients
            margins_rows = _csv_rows_for_series(target, args.k_max, budget, report)
    if args.method in ("grid", "both"):
        if target.kind == "G":
            fn = lambda x: functionals.G_q_fd(target.m, QPoint(target.q, x), FDStep(target.c), budget)
            label = f"G_{target.m}(q={target.q},c={target.c})"
        else:
            fn = lambda x: functionals.F_q_fd(target.quad, QPoint(target.q, x), FDStep(target.c), budget)
            label = f"F{target.quad.as_tuple()}(q={target.q},c={target.c})"
        sign_flipped = series_cm.target_plan(target)["sign_flipped"]
        wrapped = (lambda x, f=fn: -f(x)) if sign_flipped else fn
        grid_report = series_cm.check_cm_grid(
            wrapped,
            args.x_min,
            args.x_max,
            args.grid,
            args.h,
            args.k_diff,
            slack=args.slack,
            label=("-" if sign_flipped else "") + label,
        )
        reports.append(grid_report)

    statuses = {r.status for r in reports}
    payload = {"config": {"command": "certify", "budget": _budget_dict(budget), "flags": _flag_dict(args)}}
    if len(reports) == 1:
        payload["report"] = reports[0].to_dict()
    else:
        payload["reports"] = [r.to_dict() for r in reports]

    if args.format == "json":
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    elif args.format == "text":
        for r in reports:
            _emit(
                f"{r.target.get('method')}: status={r.status.value} min_margin={r.min_margin} "
                f"k_range={list(r.k_range)} first_violation={r.first_violation}\n",
                args.out,
            )
    elif args.format == "csv":
        _require(margins_rows is not None, "--format csv requires --method series")
        _emit(margins_rows, args.out)
    if CertStatus.VIOLATED in statuses:
        return EXIT_VIOLATED
    if CertStatus.INCONCLUSIVE in statuses:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _csv_rows_for_series(target, k_max, budget, report) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["k", "coefficient", "margin", "regime"])
    flip = report.target["sign_flipped"]
    regime = report.target["regime"]
    k_start = report.k_range[0]
    for k in range(k_start, k_max + 1):
        coeff = series_cm.target_coefficient(target, k, budget)
        margin = -coeff if flip else coeff
        writer.writerow([k, mp.nstr(coeff, 20), mp.nstr(margin, 20), regime])
    return buf.getvalue()


# ---------------------------------------------------------------- verify


def cmd_verify(args) -> int:
    budget = _resolve_budget(args)
    lemma = args.lemma
    if lemma == "2.1":
        _require(args.r_max is not None and args.k_max is not None, "--lemma 2.1 needs --r-max and --k-max")
        report = combinatorics.verify_conv_inequality(args.r_max, args.k_max, include_empirical=args.include_empirical)
    elif lemma == "proof-steps":
        _require(args.s is not None, "--lemma proof-steps needs --s")
        _require(args.k_max is not None, "--lemma proof-steps needs --k-max")
        t_max = args.t_max if args.t_max is not None else max(args.s, 1)
        r_max = args.r_max if args.r_max is not None else max(args.s, 1)
        merged = combinatorics.LemmaReport(
            lemma="proof-steps",
            ranges={"s": args.s, "T": t_max, "r_max": r_max, "k_max": args.k_max},
        )
        for r in range(max(args.s, 1), r_max + 1):
            rep = combinatorics.verify_proof_steps(args.s, t_max, r, args.k_max)
            merged.violations.extend(rep.violations)
            merged.equalities.extend(rep.equalities)
            merged.observations.extend(rep.observations)
        report = merged
    elif lemma == "power-sums":
        _require(args.m_max is not None and args.n_max is not None, "--lemma power-sums needs --m-max and --n-max")
        report = combinatorics.verify_power_sum_bounds(args.m_max, args.n_max)
    elif lemma == "ratio":
        _require(None not in (args.n, args.q, args.c), "--lemma ratio needs --n --q --c")
        report = analysis_props.verify_ratio_ineq(args.n, args.q, args.c, budget)
    elif lemma == "weights":
        report = _weights_report(args.grid, budget)
    else:  # pragma: no cover
        raise UsageError(f"unknown --lemma {lemma}")

    payload = {
        "config": {"command": "verify", "budget": _budget_dict(budget), "flags": _flag_dict(args)},
        "report": report.to_dict(),
    }
    if args.format == "json":
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    elif args.format == "text":
        _emit(
            f"lemma={report.lemma} violations={len(report.violations)} "
            f"equalities={len(report.equalities)} observations={len(report.observations)} passed={report.passed}\n",
            args.out,
        )
    else:
        raise UsageError("verify supports --format json or text")
    return EXIT_OK if report.passed else EXIT_VIOLATED


def _weights_report(grid_points: int, budget) -> combinatorics.LemmaReport:
    """Monotonicity of u (ln u)^2/(1-u)^2 on a grid, plus the concavity/
    convexity sign dichotomy of the log-ratio second derivative."""
    report = combinatorics.LemmaReport(lemma="weights", ranges={"grid": grid_points})
    prev = None
    for i in range(1, grid_points + 1):
        u = i / (grid_points + 1)
        w = analysis_props.weight_u(u)
        if prev is not None and not w > prev[1]:
            report.violations.append(
                {"params": {"check": "weight-increasing", "u": u}, "k": i, "lhs": mp.nstr(prev[1], 20), "rhs": mp.nstr(w, 20)}
            )
        prev = (u, w)
    for y in (0.1, 0.5, 0.9):
        for c in (0.25, 0.5, 0.75, 1.5, 3.0):
            for z in (0.1, 0.5, 1.0, 2.0, 10.0):
                _, hdd = analysis_props.h_second_deriv(z, analysis_props.RatioParams(y, c), budget)
                ok = hdd <= 0 if c < 1 else hdd >= 0
                if not ok:
                    report.violations.append(
                        {
                            "params": {"check": "hdd-sign", "y": y, "c": c, "z": z},
                            "k": 0,
                            "lhs": mp.nstr(hdd, 20),
                            "rhs": "0",
                        }
                    )
    return report


def cmd_props(args) -> int:
    budget = _resolve_budget(args)
    report = _weights_report(args.grid, budget)
    for n in (4, 7, 12):
        for q in (0.5, 2.0):
            for c in (0.5, 2.0):
                sub = analysis_props.verify_ratio_ineq(n, q, c, budget)
                report.violations.extend(sub.violations)
    report.ranges.update({"ratio_ns": [4, 7, 12], "ratio_qs": [0.5, 2.0], "ratio_cs": [0.5, 2.0]})
    payload = {
        "config": {"command": "props", "budget": _budget_dict(budget), "flags": _flag_dict(args)},
        "report": report.to_dict(),
    }
    if args.format == "json":
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    else:
        _emit(f"violations={len(report.violations)} passed={report.passed}\n", args.out)
    return EXIT_OK if report.passed else EXIT_VIOLATED


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qpoly", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, default_format="json"):
        p.add_argument("--rel-tol", dest="rel_tol", type=float, default=None, help="target relative error")
        p.add_argument("--digits", type=int, default=None, help="working precision (decimal digits)")
        p.add_argument("--max-terms", dest="max_terms", type=int, default=None, help="series term cap")
        p.add_argument("--format", choices=("json", "csv", "text"), default=default_format)
        p.add_argument("--out", default=None, help="write the report to this path instead of stdout")
        p.add_argument("--config", default=None, help="key=value file presetting the budget")

    p_eval = sub.add_parser("eval", help="evaluate a function at a point")
    p_eval.add_argument("--fn", required=True, choices=("gamma_q", "psi_q", "psi_q_m", "F", "G", "F_deriv", "G_deriv"))
    for flag, typ in (("--q", float), ("--x", float), ("--c", float)):
        p_eval.add_argument(flag, type=typ, default=None)
    for flag in ("--r", "--m", "--n", "--s"):
        p_eval.add_argument(flag, type=int, default=None)
    add_common(p_eval, default_format="text")
    p_eval.set_defaults(func=cmd_eval)

    p_cert = sub.add_parser("certify", help="coefficient-positivity / grid certification")
    p_cert.add_argument("--target", required=True, choices=("G", "F"))
    p_cert.add_argument("--q", type=float, default=None)
    p_cert.add_argument("--c", type=float, default=None)
    for flag in ("--r", "--m", "--n", "--s"):
        p_cert.add_argument(flag, type=int, default=None)
    p_cert.add_argument("--k-max", dest="k_max", type=int, default=200)
    p_cert.add_argument("--abs-slack", dest="abs_slack", type=float, default=series_cm.DEFAULT_ABS_SLACK)
    p_cert.add_argument("--method", choices=("series", "grid", "both"), default="series")
    p_cert.add_argument("--x-min", dest="x_min", type=float, default=0.1)
    p_cert.add_argument("--x-max", dest="x_max", type=float, default=5.0)
    p_cert.add_argument("--grid", type=int, default=25, help="grid points for --method grid")
    p_cert.add_argument("--h", type=float, default=0.05, help="difference step for --method grid")
    p_cert.add_argument("--k-diff", dest="k_diff", type=int, default=8, help="difference orders for --method grid")
    p_cert.add_argument("--slack", type=float, default=series_cm.DEFAULT_GRID_SLACK)
    add_common(p_cert)
    p_cert.set_defaults(func=cmd_certify)

    p_ver = sub.add_parser("verify", help="exact lemma verification sweeps")
    p_ver.add_argument("--lemma", required=True, choices=("2.1", "proof-steps", "power-sums", "ratio", "weights"))
    p_ver.add_argument("--r-max", dest="r_max", type=int, default=None)
    p_ver.add_argument("--k-max", dest="k_max", type=int, default=None)
    p_ver.add_argument("--m-max", dest="m_max", type=int, default=None)
    p_ver.add_argument("--n-max", dest="n_max", type=int, default=None)
    p_ver.add_argument("--s", type=int, default=None)
    p_ver.add_argument("--t-max", dest="t_max", type=int, default=None)
    p_ver.add_argument("--n", type=int, default=None)
    p_ver.add_argument("--q", type=float, default=None)
    p_ver.add_argument("--c", type=float, default=None)
    p_ver.add_argument("--grid", type=int, default=1000)
    p_ver.add_argument("--include-empirical", dest="include_empirical", action="store_true")
    add_common(p_ver)
    p_ver.set_defaults(func=cmd_verify)

    p_props = sub.add_parser("props", help="bundled analytic property checks")
    p_props.add_argument("--grid", type=int, default=1000)
    add_common(p_props)
    p_props.set_defaults(func=cmd_props)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags already; normalise other codes
        return EXIT_USAGE if exc.code not in (0,) else 0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, NonConvergence) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_EVAL


if __name__ == "__main__":
    sys.exit(main())
