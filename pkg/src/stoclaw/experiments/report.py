"""Report assembly and emission: report.json plus summary.csv.

Rows are typed dicts sharing one fixed column set, so every experiment's
summary.csv has the same header.  Floats are serialized with repr(), which
round-trips exactly; row order is fixed by the (single-threaded) assembly,
so identical configs and seeds give byte-identical CSVs no matter how many
worker threads produced the numbers.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

from ..estimators import EstimateSummary, RateFit
from ..model import AssumptionCheck

CSV_COLUMNS = ("kind", "name", "mean", "var", "half_width_95", "n_paths",
               "n_failed", "seed", "slope", "intercept", "r2", "n_points",
               "value", "passed", "detail")


def estimate_row(summary: EstimateSummary) -> dict:
    return {"kind": "estimate", "name": summary.name, "mean": summary.mean,
            "var": summary.variance, "half_width_95": summary.half_width_95,
            "n_paths": summary.n_paths, "n_failed": summary.n_failed,
            "seed": summary.base_seed}


def fit_row(fit: RateFit) -> dict:
    return {"kind": "fit", "name": fit.name, "slope": fit.slope,
            "intercept": fit.intercept, "r2": fit.r_squared,
            "n_points": fit.n_points}


def value_row(name: str, value: float, detail: str = "") -> dict:
    return {"kind": "value", "name": name, "value": value, "detail": detail}


def verdict_row(name: str, passed: bool, value=None, detail: str = "") -> dict:
    return {"kind": "verdict", "name": name, "passed": bool(passed),
            "value": value, "detail": detail}


def check_row(check: AssumptionCheck) -> dict:
    return {"kind": "check", "name": check.name, "passed": check.passed,
            "detail": check.detail}


@dataclass
class Report:
    """Self-contained record of one experiment run."""

    experiment: str
    config: dict
    rows: list[dict] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def verdicts(self) -> list[dict]:
        return [r for r in self.rows if r["kind"] in ("verdict", "check")]

    @property
    def passed(self) -> bool:
        verdicts = self.verdicts()
        return bool(verdicts) and all(r["passed"] for r in verdicts)

    def failing_names(self) -> list[str]:
        return [r["name"] for r in self.verdicts() if not r["passed"]]

    def as_dict(self) -> dict:
        return {"experiment": self.experiment, "passed": self.passed,
                "config": self.config, "rows": self.rows, "meta": self.meta}


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_report(report: Report, out_dir) -> tuple[Path, Path]:
    """Write report.json and summary.csv under out_dir; returns both paths."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        json_path = out / "report.json"
        with open(json_path, "w", newline="") as fh:
            json.dump(report.as_dict(), fh, indent=2)
            fh.write("\n")
        csv_path = out / "summary.csv"
        with open(csv_path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for row in report.rows:
                writer.writerow(
                    _format_cell(row.get(col)) for col in CSV_COLUMNS)
    except OSError as exc:
        raise OSError(f"cannot write report under {out}: {exc}") from exc
    return json_path, csv_path
