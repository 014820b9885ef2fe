"""Command-line interface: analytical reports, sweeps, simulations, gates.

Every command writes CSV (default) or JSON to stdout or ``--out``.  CSV uses
RFC-4180 quoting, '.' decimals and LF line endings; JSON is one top-level
object with ``metadata`` and ``rows``.  With ``--deterministic`` the
timestamp is suppressed so identical invocations are byte-identical.

Exit codes: 0 success, 1 verification failure (``verify``), 2 usage or
parameter error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from datetime import datetime, timezone

from . import __version__, experiments, simulate
from .analysis import coefficient_report, coefficient_report_limit
from .errors import BranchLabError
from .predictors import PREDICTOR_POLICIES, Scheme
from .sorting import ALG_CQS, ALG_YQS, SiteId
from .verify import run_all

_SCHEME_CHOICES = ("1bit", "2bit-sc", "2bit-fc", "all")


def _parse_schemes(value: str):
    if value == "all":
        return list(experiments.SCHEMES)
    return [Scheme.parse(value)]


def _parse_int_list(value: str):
    return tuple(int(x) for x in value.split(",") if x != "")


def _parse_float_list(value: str):
    return tuple(float(x) for x in value.split(",") if x != "")


def _render(rows, metadata, fmt: str, out, deterministic: bool) -> str:
    if not deterministic:
        metadata = dict(metadata)
        metadata["timestamp"] = datetime.now(timezone.utc).isoformat()
    if fmt == "json":
        text = json.dumps({"metadata": metadata, "rows": rows}, indent=2)
        text += "\n"
    else:
        buf = io.StringIO()
        if rows:
            writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()),
                                    lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
        text = buf.getvalue()
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return text


def _add_output_args(sub):
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--out", default=None, help="write to file instead of stdout")
    sub.add_argument("--deterministic", action="store_true",
                     help="omit the timestamp for byte-identical reruns")


def _report_rows(reports):
    rows = []
    for rep in reports:
        row = {
            "algorithm": rep.algorithm,
            "scheme": rep.scheme.value,
            "regime": rep.regime,
            "params": "|".join(f"{p:g}" for p in rep.params),
            "a": rep.a,
            "entropy": rep.entropy,
            "coefficient": rep.coefficient,
        }
        for site in (SiteId.Y1, SiteId.Y2, SiteId.Y3, SiteId.Y4):
            row[f"a_{site.value}"] = rep.per_site[site] if rep.per_site else ""
        rows.append(row)
    return rows


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="branchlab",
        description="Branch-miss analysis and simulation for classic and "
                    "dual-pivot Quicksort with pivot sampling.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="finite-sample branch-miss coefficients")
    p.add_argument("--algorithm", choices=(ALG_CQS, ALG_YQS), required=True)
    p.add_argument("--t", required=True, type=_parse_int_list,
                   help="sampling parameter, e.g. 2,2 or 1,1,1")
    p.add_argument("--scheme", choices=_SCHEME_CHOICES, default="all")
    _add_output_args(p)

    p = sub.add_parser("analyze-limit", help="large-sample-limit coefficients")
    p.add_argument("--algorithm", choices=(ALG_CQS, ALG_YQS), required=True)
    p.add_argument("--tau", required=True, type=_parse_float_list,
                   help="limit split ratios, e.g. 0.5,0.5 or 0.1,0.8,0.1")
    p.add_argument("--scheme", choices=_SCHEME_CHOICES, default="all")
    _add_output_args(p)

    p = sub.add_parser("table", help="the 30 standard coefficients")
    _add_output_args(p)

    p = sub.add_parser("simulate", help="seeded branch-miss simulation")
    p.add_argument("--algorithm", choices=(ALG_CQS, ALG_YQS), required=True)
    p.add_argument("--t", required=True, type=_parse_int_list)
    p.add_argument("--scheme", choices=_SCHEME_CHOICES[:-1], required=True)
    p.add_argument("--sizes", required=True, type=_parse_int_list)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--w", type=int, default=None, help="Insertionsort cutoff (default max(k,16))")
    p.add_argument("--policy", choices=PREDICTOR_POLICIES, default="persistent")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: BRANCHLAB_THREADS or cpu count)")
    p.add_argument("--detail", action="store_true", help="emit per-trial rows")
    _add_output_args(p)

    p = sub.add_parser("sweep-sym", help="balanced-sampling sweep (median/tertiles)")
    p.add_argument("--t-max", type=int, default=10)
    p.add_argument("--scheme", choices=_SCHEME_CHOICES, default="all")
    _add_output_args(p)

    p = sub.add_parser("sweep-skew", help="extreme-skew sampling sweep")
    p.add_argument("--t-max", type=int, default=10)
    p.add_argument("--scheme", choices=_SCHEME_CHOICES, default="all")
    _add_output_args(p)

    p = sub.add_parser("qplot", help="combined-cost curves over the pivot skew")
    p.add_argument("--xi", type=_parse_float_list, default=(5.0, 15.0, 30.0, 50.0))
    p.add_argument("--scheme", choices=_SCHEME_CHOICES, default="all")
    p.add_argument("--points", type=int, default=99)
    _add_output_args(p)

    p = sub.add_parser("tau-star", help="optimal pivot skew as a function of xi")
    p.add_argument("--xi-max", type=float, default=200.0)
    p.add_argument("--step", type=float, default=1.0)
    p.add_argument("--scheme", choices=_SCHEME_CHOICES, default="all")
    _add_output_args(p)

    p = sub.add_parser("xi-c", help="critical cost thresholds (closed vs numeric)")
    p.add_argument("--scheme", choices=_SCHEME_CHOICES, default="all")
    _add_output_args(p)

    p = sub.add_parser("opt-t", help="best finite sampling parameter")
    p.add_argument("--xi", type=float, default=0.0)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--scheme", choices=_SCHEME_CHOICES, default="all")
    p.add_argument("--algorithm", choices=(ALG_CQS, ALG_YQS), default=ALG_CQS)
    p.add_argument("--objective", choices=("q", "bm"), default="q")
    _add_output_args(p)

    p = sub.add_parser("verify", help="run all oracle gates")
    p.add_argument("--samples", type=int, default=10 ** 6,
                   help="Monte Carlo samples per gate")
    p.add_argument("--seed", type=int, default=None, help="Monte Carlo seed override")
    _add_output_args(p)

    return parser


def _metadata(command: str, **params) -> dict:
    return {"command": command, "version": __version__, "parameters": params}


def _cmd_analyze(args) -> int:
    schemes = _parse_schemes(args.scheme)
    reports = [coefficient_report(args.algorithm, s, args.t) for s in schemes]
    meta = _metadata("analyze", algorithm=args.algorithm, t=list(args.t),
                     scheme=args.scheme)
    _render(_report_rows(reports), meta, args.format, args.out, args.deterministic)
    return 0


def _cmd_analyze_limit(args) -> int:
    schemes = _parse_schemes(args.scheme)
    reports = [coefficient_report_limit(args.algorithm, s, args.tau) for s in schemes]
    meta = _metadata("analyze-limit", algorithm=args.algorithm, tau=list(args.tau),
                     scheme=args.scheme)
    _render(_report_rows(reports), meta, args.format, args.out, args.deterministic)
    return 0


def _cmd_table(args) -> int:
    _render(experiments.table_rows(), _metadata("table"), args.format, args.out,
            args.deterministic)
    return 0


def _cmd_simulate(args) -> int:
    config = simulate.ExperimentConfig(
        algorithm=args.algorithm, t=args.t, scheme=Scheme.parse(args.scheme),
        sizes=args.sizes, trials=args.trials, seed=args.seed, w=args.w,
        policy=args.policy, output=args.format)
    report = simulate.run_simulation(config, threads=args.threads)
    meta = _metadata("simulate", **report.metadata)
    meta["analytic_coefficient"] = report.analytic_coefficient
    meta["fitted_coefficient"] = report.fitted_coefficient
    rows = report.rows if args.detail else report.aggregates
    _render(rows, meta, args.format, args.out, args.deterministic)
    return 0


def _cmd_sweep_sym(args) -> int:
    rows = experiments.sweep_symmetric_rows(args.t_max, _parse_schemes(args.scheme))
    _render(rows, _metadata("sweep-sym", t_max=args.t_max, scheme=args.scheme),
            args.format, args.out, args.deterministic)
    return 0


def _cmd_sweep_skew(args) -> int:
    rows = experiments.sweep_skewed_rows(args.t_max, _parse_schemes(args.scheme))
    _render(rows, _metadata("sweep-skew", t_max=args.t_max, scheme=args.scheme),
            args.format, args.out, args.deterministic)
    return 0


def _cmd_qplot(args) -> int:
    rows = experiments.qplot_rows(args.xi, _parse_schemes(args.scheme), args.points)
    _render(rows, _metadata("qplot", xi=list(args.xi), scheme=args.scheme,
                            points=args.points),
            args.format, args.out, args.deterministic)
    return 0


def _cmd_tau_star(args) -> int:
    rows = experiments.tau_star_rows(args.xi_max, args.step, _parse_schemes(args.scheme))
    _render(rows, _metadata("tau-star", xi_max=args.xi_max, step=args.step,
                            scheme=args.scheme),
            args.format, args.out, args.deterministic)
    return 0


def _cmd_xi_c(args) -> int:
    rows = experiments.xi_c_rows(_parse_schemes(args.scheme))
    _render(rows, _metadata("xi-c", scheme=args.scheme), args.format, args.out,
            args.deterministic)
    return 0


def _cmd_opt_t(args) -> int:
    rows = experiments.opt_t_rows(args.xi, args.k, _parse_schemes(args.scheme),
                                  algorithm=args.algorithm, objective=args.objective)
    _render(rows, _metadata("opt-t", xi=args.xi, k=args.k, scheme=args.scheme,
                            algorithm=args.algorithm, objective=args.objective),
            args.format, args.out, args.deterministic)
    return 0


def _cmd_verify(args) -> int:
    kwargs = {"samples": args.samples}
    if args.seed is not None:
        kwargs["seed"] = args.seed
    results = run_all(**kwargs)
    rows = [r.as_row() for r in results]
    _render(rows, _metadata("verify", samples=args.samples), args.format, args.out,
            args.deterministic)
    failed = [r.gate for r in results if not r.passed]
    if failed:
        sys.stderr.write(json.dumps({"error": "verification failed",
                                     "failed_gates": failed}) + "\n")
        return 1
    return 0


_HANDLERS = {
    "analyze": _cmd_analyze,
    "analyze-limit": _cmd_analyze_limit,
    "table": _cmd_table,
    "simulate": _cmd_simulate,
    "sweep-sym": _cmd_sweep_sym,
    "sweep-skew": _cmd_sweep_skew,
    "qplot": _cmd_qplot,
    "tau-star": _cmd_tau_star,
    "xi-c": _cmd_xi_c,
    "opt-t": _cmd_opt_t,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except BranchLabError as exc:
        sys.stderr.write(json.dumps({"error": str(exc),
                                     "type": type(exc).__name__}) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
