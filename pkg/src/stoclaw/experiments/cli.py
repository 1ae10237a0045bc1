"""Command-line entry point.

Subcommands: validate, oracle, bv, rate, cdep, fracbv.  Every run reads a
strict JSON config (oracle supplies a built-in default), writes report.json
and summary.csv under --out, renders figures unless --no-figures, and exits
0 when all verdicts pass, 1 when any fails, 2 on configuration or
validation errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ..errors import InvalidArgumentError
from .config import load_config, parse_config
from .figures import render_figures
from .report import emit_report
from .runners import (run_bv, run_continuous_dependence, run_fractional_bv,
                      run_oracles, run_validate, run_viscosity_rate)

_RUNNERS = {
    "validate": run_validate,
    "oracle": run_oracles,
    "bv": run_bv,
    "rate": run_viscosity_rate,
    "cdep": run_continuous_dependence,
    "fracbv": run_fractional_bv,
}

_HELP = {
    "validate": "check the problem against the standing assumptions",
    "oracle": "run the closed-form solver oracles",
    "bv": "uniform BV bound experiment",
    "rate": "vanishing viscosity convergence rate experiment",
    "cdep": "continuous dependence on coefficients experiment",
    "fracbv": "fractional BV regularity experiment",
}

_DEFAULT_ORACLE_DOC = {
    "mc": {"n_paths": 64, "base_seed": 2026},
    "experiment": {"kind": "oracle"},
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stoclaw",
        description="Simulator and estimator suite for stochastic balance "
                    "laws under vanishing viscosity.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in _HELP.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=Path, default=None,
                       required=(name != "oracle"),
                       help="JSON run configuration")
        p.add_argument("--out", type=Path, default=None,
                       help="output directory (default: stoclaw-<command>)")
        p.add_argument("--seed", type=int, default=None,
                       help="override mc.base_seed")
        p.add_argument("--paths", type=int, default=None,
                       help="override mc.n_paths")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads for Monte Carlo paths")
        p.add_argument("--no-figures", action="store_true",
                       help="skip figure rendering")
        p.add_argument("--snapshots", action="store_true",
                       help="dump snapshots/*.csv for one representative path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out_dir = args.out if args.out is not None \
        else Path(f"stoclaw-{args.command}")
    try:
        if args.config is not None:
            doc = load_config(args.config)
        else:
            doc = {k: dict(v) for k, v in _DEFAULT_ORACLE_DOC.items()}
        if args.seed is not None or args.paths is not None:
            mc = dict(doc.get("mc", {"n_paths": 64, "base_seed": 2026}))
            if args.seed is not None:
                mc["base_seed"] = args.seed
            if args.paths is not None:
                mc["n_paths"] = args.paths
            doc["mc"] = mc
        cfg = parse_config(doc, expected_kind=args.command)
        snapshots_dir = out_dir / "snapshots" if args.snapshots else None
        report, figure_specs = _RUNNERS[args.command](
            cfg, threads=max(1, args.threads), snapshots_dir=snapshots_dir)
    except InvalidArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        json_path, csv_path = emit_report(report, out_dir)
        if not args.no_figures and figure_specs:
            render_figures(figure_specs, out_dir / "figures")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for row in report.verdicts():
        state = "PASS" if row["passed"] else "FAIL"
        print(f"{state} {row['name']}: {row.get('detail', '')}")
    print(f"report: {json_path}")
    if report.passed:
        return 0
    for name in report.failing_names():
        print(f"FAIL {name}", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
