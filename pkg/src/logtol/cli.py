"""Command-line interface.

Exit status: 0 success (or Pass), 1 usage error, 2 numeric or feasibility
failure, 3 scored Fail (``score`` only; suppress with ``--no-fail-status``).
Every subcommand accepts ``--json`` for a single machine-readable document
with full-precision numbers.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Any, Sequence

from . import __version__
from .calibrate import (
    DEFAULT_TOL,
    bootstrap_band,
    calibrate_two_point,
    fit_least_squares,
    prediction_band,
)
from .datafile import ProfileConfig, load_points, load_profile, parse_point
from .diagnostics import FitReport, compare_models
from .errors import CalibrationError, DegenerateDataError, InputError, LogTolError, NumericError
from .fidelity import DEFAULT_EPSILON, fidelity_interval
from .microrange import (
    DEFAULT_Z,
    agresti_coull_interval,
    micro_range_advisory,
    wald_interval,
    wilson_interval,
)
from .model import DEFAULT_WORDS_PER_PAGE, LogModel, SizeUnit, TolerancePoint, linearize_at, tolerance
from .scorecard import Evaluation, ScoreScale, raw_score, score

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2
EXIT_FAIL = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit with 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(value: float | None) -> str:
    if value is None:
        return "undefined"
    return f"{value:.6g}"


def _emit_json(doc: dict[str, Any]) -> None:
    print(json.dumps(doc, indent=2))


def parse_range(text: str) -> list[float]:
    """``lo:hi:step`` -> inclusive grid ``lo, lo+step, ..., <= hi``."""
    try:
        lo, hi, step = (float(p) for p in text.split(":"))
    except ValueError:
        raise UsageError(f"range must look like lo:hi:step, got {text!r}") from None
    if not (step > 0 and hi > lo):
        raise UsageError(f"empty range {text!r}: need lo < hi and step > 0")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + i * step for i in range(count)]


# ---------------------------------------------------------------------------
# argument helpers


def _add_unit_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--unit", choices=["words", "pages"], default=None, help="size unit (default words)")
    p.add_argument("--words-per-page", type=int, default=None, help=f"default {DEFAULT_WORDS_PER_PAGE}")


def _unit(args: argparse.Namespace, fallback: SizeUnit | None = None) -> SizeUnit:
    if args.unit is None and args.words_per_page is None and fallback is not None:
        return fallback
    wpp = args.words_per_page if args.words_per_page is not None else (
        fallback.words_per_page if fallback else DEFAULT_WORDS_PER_PAGE
    )
    kind = args.unit or (fallback.kind.value if fallback else "words")
    return SizeUnit.parse(kind, wpp)


def _add_model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--profile", help="client profile name or JSON file")
    p.add_argument("--a", type=float, help="curve scale a")
    p.add_argument("--b", type=float, help="curve curvature b (per size unit)")
    _add_unit_args(p)


def _model(args: argparse.Namespace) -> tuple[LogModel, ProfileConfig | None]:
    profile = load_profile(args.profile) if args.profile else None
    if profile is None and (args.a is None or args.b is None):
        raise UsageError("a model is required: give --profile or both --a and --b")
    base = profile.model if profile else None
    a = args.a if args.a is not None else base.a
    b = args.b if args.b is not None else base.b
    return LogModel(a, b, _unit(args, base.unit if base else None)), profile


def _add_points_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--xy", action="append", metavar="X,E", default=[], help="data point (repeatable)")
    p.add_argument("--points", metavar="FILE", help="CSV file of x,E[,w] rows")
    p.add_argument("--weights", help="comma-separated weights, one per point")
    _add_unit_args(p)


def _points(args: argparse.Namespace) -> list[TolerancePoint]:
    pts: list[TolerancePoint] = []
    if args.points:
        pts.extend(load_points(args.points))
    for i, pair in enumerate(args.xy, start=1):
        pts.append(parse_point(pair, where=f"--xy #{i}: "))
    if args.weights:
        try:
            ws = [float(w) for w in args.weights.split(",")]
        except ValueError:
            raise UsageError(f"--weights must be comma-separated numbers, got {args.weights!r}") from None
        if len(ws) != len(pts):
            raise UsageError(f"--weights has {len(ws)} values for {len(pts)} points")
        pts = [TolerancePoint(p.x, p.e, w) for p, w in zip(pts, ws)]
    if not pts:
        raise UsageError("no data points: give --xy X,E (repeatable) or --points FILE")
    return pts


def _fit_doc(report: FitReport) -> dict[str, Any]:
    doc: dict[str, Any] = {}
    model = report.model
    if isinstance(model, LogModel):
        doc.update(a=model.a, b=model.b)
    else:
        doc.update(c=model.c)
    doc.update(
        SSE=report.sse,
        RMSE=report.rmse,
        R2=report.r_squared,
        AIC=report.aic,
        BIC=report.bic,
        n=report.n,
        k=report.k,
        sigma2=report.sigma2,
        covariance=report.covariance.tolist(),
        notes=list(report.notes),
    )
    return doc


# ---------------------------------------------------------------------------
# subcommands


def cmd_calibrate2(args: argparse.Namespace) -> int:
    unit = _unit(args)
    p0, p1 = TolerancePoint(args.x0, args.E0), TolerancePoint(args.x1, args.E1)
    try:
        model = calibrate_two_point(p0, p1, tol=args.tol, unit=unit)
    except CalibrationError as exc:
        rep = exc.report
        lo, hi = rep.bounds
        print(
            f"error: infeasible anchor pair; need min{{1,rho}} < r < max{{1,rho}}, "
            f"got r={rep.r:.6g} with bounds ({lo:.6g}, {hi:.6g})",
            file=sys.stderr,
        )
        if args.json:
            _emit_json({"command": "calibrate2", "feasible": False, "r": rep.r, "rho": rep.rho,
                        "lower_bound": lo, "upper_bound": hi})
        return EXIT_NUMERIC
    e_x = tolerance(model, args.x) if args.x is not None else None
    if args.json:
        doc: dict[str, Any] = {"command": "calibrate2", "feasible": True, "a": model.a, "b": model.b,
                               "unit": model.unit.kind.value, "words_per_page": model.unit.words_per_page}
        if e_x is not None:
            doc["x"] = args.x
            doc["E"] = e_x
        _emit_json(doc)
    else:
        print(f"a={model.a:.6f}, b={model.b:.8g}")
        if e_x is not None:
            print(f"E({args.x:g})={e_x:.6f}")
    return EXIT_OK


def cmd_fit(args: argparse.Namespace) -> int:
    pts = _points(args)
    unit = _unit(args)
    report = fit_least_squares(pts, b0=args.b0, tol=args.tol, unit=unit)
    model = report.model
    grid = parse_range(args.band) if args.band else None
    if args.bootstrap is not None and grid is None:
        raise UsageError("--bootstrap needs a --band grid to evaluate on")
    band = prediction_band(report, grid, args.multiplier) if grid else None
    boot = (
        bootstrap_band(pts, grid, args.bootstrap, args.seed, unit=unit, multiplier=args.multiplier, tol=args.tol)
        if args.bootstrap is not None
        else None
    )
    e_x = tolerance(model, args.x) if args.x is not None else None

    if args.json:
        doc = {"command": "fit", "unit": unit.kind.value, "words_per_page": unit.words_per_page}
        doc.update(_fit_doc(report))
        if e_x is not None:
            doc["x"] = args.x
            doc["E"] = e_x
        if band is not None:
            rows = []
            for i, x in enumerate(band.xs):
                row = {"x": x, "center": band.center[i], "halfwidth": band.halfwidth[i]}
                if boot is not None:
                    row["bootstrap_halfwidth"] = boot.halfwidth[i]
                rows.append(row)
            doc["band"] = rows
            doc["band_degenerate"] = band.degenerate
            if boot is not None:
                doc["bootstrap"] = {"resamples": args.bootstrap, "seed": args.seed}
        _emit_json(doc)
        return EXIT_OK

    print(f"a={model.a:.6f}, b={model.b:.8g}, SSE={report.sse:.6f}")
    if args.report:
        print(f"RMSE={_fmt(report.rmse)}")
        print(f"R2={_fmt(report.r_squared)}")
        print(f"AIC={_fmt(report.aic)}")
        print(f"BIC={_fmt(report.bic)}")
        print(f"sigma2={_fmt(report.sigma2)}")
        cov = report.covariance
        print(f"cov_aa={_fmt(cov[0, 0])}, cov_ab={_fmt(cov[0, 1])}, cov_bb={_fmt(cov[1, 1])}")
        for note in report.notes:
            print(f"note: {note}")
    if e_x is not None:
        print(f"E({args.x:g})={e_x:.6f}")
    if band is not None:
        print()
        header = "x,center,halfwidth" + (",bootstrap_halfwidth" if boot else "")
        print(header)
        for i, x in enumerate(band.xs):
            cells = [x, band.center[i], band.halfwidth[i]] + ([boot.halfwidth[i]] if boot else [])
            print(",".join(_fmt(c) for c in cells))
    return EXIT_OK


def cmd_score(args: argparse.Namespace) -> int:
    model, profile = _model(args)
    base_scale = profile.scale if profile else ScoreScale()
    scale = ScoreScale(
        args.pt if args.pt is not None else base_scale.pt,
        args.msv if args.msv is not None else base_scale.msv,
    )
    card = score(model, scale, Evaluation(args.ewc, args.apt))
    fields: dict[str, Any] = {
        "EWC": card.ewc,
        "APT": card.apt,
        "a": model.a,
        "b": model.b,
        "unit": model.unit.kind.value,
        "PT": scale.pt,
        "MSV": scale.msv,
        "DPI": scale.dpi,
        "Eallowed": card.e_allowed,
        "QF": card.qf,
        "OS": card.os,
        "OSdisp": card.os_disp,
        "DM": card.dm,
        "Result": card.verdict.value,
        "MicroRange": card.micro_range_flag,
        "RawScore": raw_score(Evaluation(args.ewc, args.apt)),
    }
    if args.json:
        _emit_json({"command": "score", **fields})
    else:
        for key, value in fields.items():
            if isinstance(value, bool):
                value = str(value).lower()
            elif isinstance(value, float):
                value = _fmt(value)
            print(f"{key}={value}")
    if card.micro_range_flag:
        print(
            f"warning: EWC={card.ewc:g} words is in the micro-range (<250); score is statistically unreliable",
            file=sys.stderr,
        )
    if not card.passed and not args.no_fail_status:
        return EXIT_FAIL
    return EXIT_OK


def cmd_fidelity(args: argparse.Namespace) -> int:
    model, profile = _model(args)
    eps = args.epsilon if args.epsilon is not None else (profile.default_epsilon if profile else DEFAULT_EPSILON)
    try:
        iv = fidelity_interval(model, args.xref, eps)
    except NumericError as exc:
        alpha = exc.diagnostics.get("alpha")
        print(f"error: {exc} (alpha={_fmt(alpha)}, epsilon={eps:g})", file=sys.stderr)
        return EXIT_NUMERIC
    lo_off, hi_off = iv.relative_offsets
    doc = {
        "x_ref": iv.x_ref,
        "epsilon": iv.epsilon,
        "alpha": iv.alpha,
        "x_lower": iv.x_lower,
        "x_upper": iv.x_upper,
        "x_lower_rounded": iv.x_lower_rounded,
        "x_upper_rounded": iv.x_upper_rounded,
        "width": iv.width,
        "lower_offset": lo_off,
        "upper_offset": hi_off,
        "linear_slope": linearize_at(model, args.xref),
    }
    if args.json:
        _emit_json({"command": "fidelity", "unit": model.unit.kind.value, **doc})
    else:
        print(f"x_ref={iv.x_ref:g} epsilon={iv.epsilon:g} alpha={_fmt(iv.alpha)}")
        print(f"x_lower={_fmt(iv.x_lower)} (~{iv.x_lower_rounded})")
        print(f"x_upper={_fmt(iv.x_upper)} (~{iv.x_upper_rounded})")
        print(f"interval=[{iv.x_lower_rounded}, {iv.x_upper_rounded}] width={_fmt(iv.width)}")
        print(f"offsets={lo_off:+.1%} to {hi_off:+.1%} relative to x_ref")
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    pts = _points(args)
    if len(pts) < 3:
        raise UsageError(f"comparison needs at least 3 points, got {len(pts)}")
    cmp = compare_models(pts, unit=_unit(args))
    if args.json:
        _emit_json({
            "command": "compare",
            "log": _fit_doc(cmp.log_fit),
            "linear": _fit_doc(cmp.linear_fit),
            "delta_aic": cmp.delta_aic,
            "delta_bic": cmp.delta_bic,
            "preferred": cmp.preferred,
        })
        return EXIT_OK
    head = f"{'model':<8} {'a':>9} {'b':>9} {'c':>9} {'SSE':>9} {'RMSE':>9} {'R2':>9} {'AIC':>9} {'BIC':>9}"
    print(head)
    for name, fit in (("log", cmp.log_fit), ("linear", cmp.linear_fit)):
        m = fit.model
        a, b, c = (f"{m.a:.3f}", f"{m.b:.3f}", "") if isinstance(m, LogModel) else ("", "", f"{m.c:.3f}")
        r2 = "undef" if fit.r_squared is None else f"{fit.r_squared:.3f}"
        print(
            f"{name:<8} {a:>9} {b:>9} {c:>9} {fit.sse:>9.3f} {fit.rmse:>9.3f} {r2:>9} {fit.aic:>9.3f} {fit.bic:>9.3f}"
        )
    print(f"delta_AIC={cmp.delta_aic:.3f} delta_BIC={cmp.delta_bic:.3f} preferred={cmp.preferred}")
    return EXIT_OK


def cmd_curve(args: argparse.Namespace) -> int:
    model, _ = _model(args)
    xs = parse_range(args.range)
    if xs[0] < 0:
        raise UsageError("curve sizes must be nonnegative")
    slope = linearize_at(model, args.linear_anchor) if args.linear_anchor is not None else None
    rows = []
    for x in xs:
        row = {"x": x, "E_log": tolerance(model, x)}
        if slope is not None:
            # exact anchor equality on the x_ref row
            row["E_lin"] = row["E_log"] if x == args.linear_anchor else slope * x
        rows.append(row)
    if args.json:
        _emit_json({"command": "curve", "a": model.a, "b": model.b, "unit": model.unit.kind.value,
                    "linear_anchor": args.linear_anchor, "rows": rows})
    else:
        print(",".join(rows[0].keys()))
        for row in rows:
            print(",".join(_fmt(v) for v in row.values()))
    return EXIT_OK


def cmd_interval(args: argparse.Namespace) -> int:
    methods = {
        "wald": wald_interval,
        "wilson": wilson_interval,
        "agresti_coull": agresti_coull_interval,
    }
    chosen = list(methods) if args.method == "all" else [args.method]
    ivs = [methods[m](args.errors, args.n, args.z, args.population) for m in chosen]
    advisory = micro_range_advisory(args.n, args.rate) if args.rate is not None else None
    if args.json:
        doc: dict[str, Any] = {
            "command": "interval",
            "x": args.errors,
            "n": args.n,
            "intervals": [
                {"method": iv.method.value, "p_hat": iv.p_hat, "center": iv.center, "lower": iv.lower,
                 "upper": iv.upper, "z": iv.z, "fpc": iv.fpc}
                for iv in ivs
            ],
        }
        if advisory:
            doc["advisory"] = {"expected_count": advisory.expected_count,
                               "relative_uncertainty": advisory.relative_uncertainty,
                               "escalated": advisory.escalated, "text": advisory.advisory_text}
        _emit_json(doc)
    else:
        print("method,p_hat,lower,upper")
        for iv in ivs:
            print(f"{iv.method.value},{_fmt(iv.p_hat)},{_fmt(iv.lower)},{_fmt(iv.upper)}")
        if advisory:
            print(advisory.advisory_text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="logtol", description="Logarithmic tolerance calibration and scoring.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit one JSON document")

    p = sub.add_parser("calibrate2", parents=[common], help="two-point calibration for E(x)=a*ln(1+b*x)")
    p.add_argument("--x0", type=float, required=True, help="reference size x0")
    p.add_argument("--E0", type=float, required=True, help="tolerance at x0")
    p.add_argument("--x1", type=float, required=True, help="second size x1")
    p.add_argument("--E1", type=float, required=True, help="tolerance at x1")
    p.add_argument("--x", type=float, help="optional size to evaluate E(x)")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    _add_unit_args(p)
    p.set_defaults(func=cmd_calibrate2)

    p = sub.add_parser("fit", parents=[common], help="least-squares fit for E(x)=a*ln(1+b*x)")
    _add_points_args(p)
    p.add_argument("--x", type=float, help="optional size to evaluate E(x)")
    p.add_argument("--report", action="store_true", help="print RMSE, R2, AIC, BIC and covariance")
    p.add_argument("--band", metavar="LO:HI:STEP", help="sample the delta-method band on a grid")
    p.add_argument("--multiplier", type=float, default=1.0, help="band half-width in standard errors")
    p.add_argument("--bootstrap", type=int, metavar="R", help="add a bootstrap band with R resamples")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--b0", type=float, help="starting curvature")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("score", parents=[common], help="calibrated score and Pass/Fail for one evaluation")
    _add_model_args(p)
    p.add_argument("--ewc", type=float, required=True, help="evaluation word count")
    p.add_argument("--apt", type=float, required=True, help="absolute penalty total")
    p.add_argument("--pt", type=float, help="passing threshold (default 80)")
    p.add_argument("--msv", type=float, help="maximum score value (default 100)")
    p.add_argument("--no-fail-status", action="store_true", help="exit 0 on a Fail verdict")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("fidelity", parents=[common], help="range where the anchored linear rule stays within eps")
    _add_model_args(p)
    p.add_argument("--xref", type=float, required=True)
    p.add_argument("--epsilon", type=float)
    p.set_defaults(func=cmd_fidelity)

    p = sub.add_parser("compare", parents=[common], help="log vs linear-through-origin goodness of fit")
    _add_points_args(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("curve", parents=[common], help="sample the tolerance curve for plotting")
    _add_model_args(p)
    p.add_argument("--range", required=True, metavar="LO:HI:STEP")
    p.add_argument("--linear-anchor", type=float, metavar="XREF")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("interval", parents=[common], help="confidence interval for an error proportion")
    p.add_argument("--errors", type=int, required=True, help="observed error count x")
    p.add_argument("--n", type=int, required=True, help="sample size (words)")
    p.add_argument("--method", choices=["wald", "wilson", "agresti_coull", "all"], default="all")
    p.add_argument("--z", type=float, default=DEFAULT_Z)
    p.add_argument("--population", type=int, help="document size N for the finite-population factor")
    p.add_argument("--rate", type=float, help="expected errors per 1000 words, for the micro-range advisory")
    p.set_defaults(func=cmd_interval)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DegenerateDataError as exc:
        print(f"logtol {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, InputError) as exc:
        print(f"logtol {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LogTolError as exc:
        print(f"logtol {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
