"""Command-line interface: ``tanlars fit | simulate | report``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .data import load_dataset
from .errors import TanlarsError
from .families import get_family
from .harness import (
    ALL_CRITERIA,
    ALL_METHODS,
    CaseConfig,
    CaseReport,
    case_config,
    path_export,
    run_case,
)
from .l1 import LambdaGrid, l1_glm_path
from .mle import MleOptions
from .selection import select
from .tangent import tlars, tlasso1, tlasso2

_DOMAIN_FOR_FAMILY = {"gaussian": "real", "binomial": "binary01", "poisson": "nonneg_integer"}


def _add_mle_flags(p):
    p.add_argument("--max-iter", type=int, default=100, help="Newton iteration cap")
    p.add_argument("--grad-tol", type=float, default=1e-8, help="gradient stopping tolerance")
    p.add_argument(
        "--ridge",
        type=float,
        default=None,
        help="fallback ridge applied if the MLE diverges (default: 0 for fit, 1e-6 for simulate)",
    )


def _add_l1_flags(p):
    p.add_argument("--nlambda", type=int, default=100, help="number of l1 grid points")
    p.add_argument("--lambda-ratio", type=float, default=1e-4, help="grid span lambda_min/lambda_max")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="tanlars",
        description="Sparse GLM path estimation (tlars/tlasso1/tlasso2/l1) and benchmarking.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="fit a path on a CSV dataset")
    fit.add_argument("--data", required=True, help="CSV file with one header row")
    fit.add_argument(
        "--response",
        required=True,
        help="response column name (an all-digits value is taken as a 0-based index)",
    )
    fit.add_argument("--family", required=True, choices=sorted(_DOMAIN_FOR_FAMILY))
    fit.add_argument("--method", required=True, choices=ALL_METHODS)
    fit.add_argument("--criterion", choices=ALL_CRITERIA, help="also select one estimate")
    fit.add_argument("--out", help="write the path as CSV (plus a .meta.json sidecar)")
    fit.add_argument("--intercept", action="store_true", help="fit an unpenalized intercept")
    _add_mle_flags(fit)
    _add_l1_flags(fit)

    sim = sub.add_parser("simulate", help="run a Monte Carlo benchmark case")
    sim.add_argument(
        "--case",
        required=True,
        choices=["A1", "A2", "B1", "B2", "C1", "C2", "custom"],
        help="preset case, or 'custom' with --config",
    )
    sim.add_argument("--config", help="JSON file with a full case configuration")
    sim.add_argument("--trials", type=int, help="number of trials (overrides the preset)")
    sim.add_argument("--seed", type=int, help="base seed (overrides the preset)")
    sim.add_argument("--out", required=True, help="write the report JSON here")
    sim.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    sim.add_argument("--methods", nargs="+", choices=ALL_METHODS, help="subset of methods")
    sim.add_argument("--criteria", nargs="+", choices=ALL_CRITERIA, help="subset of criteria")
    sim.add_argument("--family", choices=sorted(_DOMAIN_FOR_FAMILY))
    sim.add_argument("--noise-sd", type=float, help="b-case collinearity noise level")
    sim.add_argument("--gen-metric", choices=["squared", "misclass"])
    _add_mle_flags(sim)
    _add_l1_flags(sim)

    rep = sub.add_parser("report", help="render a report JSON")
    rep.add_argument("--in", dest="infile", required=True, help="report JSON from simulate")
    rep.add_argument("--format", choices=["table", "csv"], default="table")
    return parser


def _cmd_fit(args) -> int:
    family = get_family(args.family)
    response = int(args.response) if args.response.isdigit() else args.response
    X, y = load_dataset(args.data, response, _DOMAIN_FOR_FAMILY[args.family])
    opts = MleOptions(
        max_iter=args.max_iter,
        grad_tol=args.grad_tol,
        ridge=args.ridge if args.ridge is not None else 0.0,
    )
    if args.method == "tlars":
        path = tlars(X, y, family, mle_opts=opts, intercept=args.intercept)
    elif args.method == "tlasso1":
        path = tlasso1(X, y, family, mle_opts=opts, intercept=args.intercept)
    elif args.method == "tlasso2":
        path = tlasso2(X, y, family)
    else:
        grid = LambdaGrid.default(X, y, family, count=args.nlambda, ratio=args.lambda_ratio)
        path = l1_glm_path(X, y, family, grid=grid, intercept=args.intercept)
    if args.out:
        path_export(path, args.out)
        print(f"wrote path to {args.out} (+ {Path(args.out).name}.meta.json)")
    if args.criterion:
        res = select(path, X, y, family, args.criterion, mle_opts=opts, intercept=args.intercept)
        names = X.column_names or tuple(f"x{j}" for j in range(X.d))
        theta = res.theta_for_metrics
        slopes, offset = X.original_scale_coefficients(theta)
        payload = {
            "criterion": res.kind,
            "chosen_index": res.chosen_index,
            "support": [names[j] for j in res.support],
            "coefficients_normalized": {names[j]: theta[j] for j in range(X.d)},
            "coefficients_original_scale": {names[j]: slopes[j] for j in range(X.d)},
            "original_scale_offset": offset,
            "intercept": res.refit_intercept,
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
    elif not args.out:
        lams = path.lambdas if hasattr(path, "lambdas") else []
        print("step,lambda,active_size")
        if hasattr(path, "breakpoints"):
            for k, bp in enumerate(path.breakpoints):
                print(f"{k},{2 * bp.max_corr:.6g},{len([v for v in bp.theta if v != 0])}")
        else:
            for k, lam in enumerate(lams):
                size = int((path.coefficients[k] != 0).sum())
                print(f"{k},{lam:.6g},{size}")
        print("(use --out to save full coefficients)", file=sys.stderr)
    return 0


def _cmd_simulate(args) -> int:
    if args.case == "custom":
        if not args.config:
            raise TanlarsError("--case custom requires --config")
        config = CaseConfig.from_dict(json.loads(Path(args.config).read_text(encoding="utf-8")))
    else:
        config = case_config(args.case)
        if args.config:
            raise TanlarsError("--config is only valid with --case custom")
    overrides = {}
    if args.trials is not None:
        overrides["m_trials"] = args.trials
    if args.seed is not None:
        overrides["base_seed"] = args.seed
    if args.methods:
        overrides["methods"] = tuple(args.methods)
    if args.criteria:
        overrides["criteria"] = tuple(args.criteria)
    if args.family:
        overrides["family"] = args.family
    if args.noise_sd is not None:
        overrides["noise_sd"] = args.noise_sd
    if args.gen_metric:
        overrides["gen_metric"] = args.gen_metric
    if args.ridge is not None:
        overrides["ridge"] = args.ridge
    overrides["mle_max_iter"] = args.max_iter
    overrides["mle_grad_tol"] = args.grad_tol
    overrides["nlambda"] = args.nlambda
    overrides["lambda_ratio"] = args.lambda_ratio
    if overrides:
        config = CaseConfig.from_dict({**config.to_dict(), **overrides})
    report = run_case(config, workers=args.workers)
    Path(args.out).write_text(report.to_json(), encoding="utf-8")
    print(
        f"wrote {args.out}: {config.m_trials} trials, "
        f"{report.failed_trials} failed, methods={','.join(config.methods)}"
    )
    return 0


def _render_table(report: CaseReport) -> str:
    cfg = report.config
    lines = [
        f"family={cfg['family']}  d={cfg['d']}  n={cfg['n']}  "
        f"trials={report.m_trials}  failed={report.failed_trials}  "
        f"seed={cfg['base_seed']}",
        "",
        f"{'method':<9}{'seq':>8}{'sep.rate':>10}  {'criterion':<10}"
        f"{'generalization':>15}{'model_sel':>11}{'param_sq_err':>14}",
    ]
    for method, mdata in report.methods.items():
        first = True
        for crit, cdata in mdata["criteria"].items():
            head = (
                f"{method:<9}{mdata['seq']:>8.4f}{mdata['separation_rate']:>10.4f}"
                if first
                else f"{'':<9}{'':>8}{'':>10}"
            )
            lines.append(
                f"{head}  {crit:<10}{cdata['generalization']:>15.6g}"
                f"{cdata['model_selection']:>11.4f}{cdata['parameter_sq_error']:>14.6g}"
            )
            first = False
    return "\n".join(lines)


def _render_csv(report: CaseReport) -> str:
    rows = ["method,seq,separation_rate,criterion,generalization,model_selection,parameter_sq_error"]
    for method, mdata in report.methods.items():
        for crit, cdata in mdata["criteria"].items():
            rows.append(
                f"{method},{mdata['seq']:.17g},{mdata['separation_rate']:.17g},{crit},"
                f"{cdata['generalization']:.17g},{cdata['model_selection']:.17g},"
                f"{cdata['parameter_sq_error']:.17g}"
            )
    return "\n".join(rows)


def _cmd_report(args) -> int:
    report = CaseReport.from_json(Path(args.infile).read_text(encoding="utf-8"))
    if args.format == "table":
        print(_render_table(report))
    else:
        print(_render_csv(report))
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "fit":
            return _cmd_fit(args)
        if args.command == "simulate":
            return _cmd_simulate(args)
        return _cmd_report(args)
    except TanlarsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
