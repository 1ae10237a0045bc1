"""Config ingestion, experiment runners, report emission, CLI exit codes."""

import json

import numpy as np
import pytest

from stoclaw import ConfigError, InvalidArgumentError
from stoclaw.experiments.cli import main
from stoclaw.experiments.config import (build_problem, load_config,
                                        parse_config, resolve_weight)
from stoclaw.experiments.report import (CSV_COLUMNS, Report, emit_report,
                                        value_row, verdict_row)
from stoclaw.experiments.runners import (run_bv, run_continuous_dependence,
                                         run_fractional_bv, run_validate,
                                         run_viscosity_rate)
from stoclaw.solver import Grid


def base_doc(kind, **experiment):
    doc = {
        "problem": {
            "flux": {"kind": "burgers", "scale": 0.5},
            "diffusion": {"kind": "zero"},
            "sigma": {"kind": "linear", "scale": 0.2},
            "eta": {"kind": "linear", "scale": 0.3},
            "measure": {"atoms": [[2.0, 1.0]]},
            "initial": {"kind": "square_wave", "inside": 1.0,
                        "outside": 0.25, "left": 0.5, "right": 1.25},
        },
        "grid": {"cells": 40, "domain_length": 2.0},
        "time": {"T": 0.05, "safety": 0.5},
        "mc": {"n_paths": 4, "base_seed": 11},
        "experiment": {"kind": kind, **experiment},
    }
    return doc


def bv_doc(**overrides):
    doc = base_doc("bv", epsilons=[0.05, 0.01])
    doc.update(overrides)
    return doc


def write_doc(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


# ---------------------------------------------------------------------------
# config parsing


def test_load_config_rejects_invalid_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(path)


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.json")


@pytest.mark.parametrize("mutate", [
    lambda d: d.update(surprise=1),
    lambda d: d["problem"].update(surprise=1),
    lambda d: d["grid"].update(surprise=1),
    lambda d: d["experiment"].update(surprise=1),
    lambda d: d["problem"]["flux"].update(surprise=1),
])
def test_unknown_keys_are_rejected(mutate):
    doc = bv_doc()
    mutate(doc)
    with pytest.raises(ConfigError, match="surprise"):
        parse_config(doc, "bv")


def test_kind_mismatch_rejected():
    with pytest.raises(ConfigError):
        parse_config(bv_doc(), "rate")


def test_missing_block_rejected():
    doc = bv_doc()
    del doc["grid"]
    with pytest.raises(ConfigError):
        parse_config(doc, "bv")


def test_mc_block_required_for_simulation_runs():
    doc = bv_doc()
    del doc["mc"]
    with pytest.raises(ConfigError, match="mc"):
        parse_config(doc, "bv")


def test_mc_defaults_applied_for_oracle():
    cfg = parse_config({"experiment": {"kind": "oracle"}}, "oracle")
    assert cfg.n_paths == 64
    assert cfg.base_seed == 2026


def test_negative_threshold_rejected():
    doc = bv_doc()
    doc["problem"]["diffusion"] = {"kind": "pospart_quadratic",
                                   "scale": 0.1, "threshold": -1.0}
    with pytest.raises(ConfigError):
        parse_config(doc, "bv")


def test_unknown_selector_kind_rejected():
    doc = bv_doc()
    doc["problem"]["flux"] = {"kind": "cubic", "scale": 1.0}
    with pytest.raises(ConfigError):
        parse_config(doc, "bv")


def test_build_problem_constants():
    cfg = parse_config(bv_doc(), "bv")
    spec, u_bound = build_problem(cfg)
    assert u_bound == pytest.approx(2.0)  # 2 * max|u0|
    assert spec.f.lipschitz == pytest.approx(2.0 * 0.5 * u_bound)
    assert not spec.x_dependent_noise
    assert spec.cells == 40


def test_build_problem_x_dependent_constants():
    doc = bv_doc()
    doc["problem"]["sigma"] = {"kind": "linear_x", "scale": 0.1,
                               "amplitude": 0.5}
    cfg = parse_config(doc, "bv")
    spec, _ = build_problem(cfg)
    assert spec.sigma.x_dependent


def test_weierstrass_initial_is_periodic():
    doc = bv_doc()
    doc["problem"]["initial"] = {"kind": "weierstrass", "amplitude": 0.2,
                                 "mean": 1.0, "octaves": 5, "roughness": 0.5}
    cfg = parse_config(doc, "bv")
    spec, _ = build_problem(cfg)
    assert len(spec.u0) == 40
    assert np.all(np.isfinite(spec.u0))


def test_resolve_weight_is_clipped_window():
    grid = Grid(cells=25, domain_length=2.0)
    phi = resolve_weight({"kind": "exp_window"}, grid)
    assert phi.shape == (25,)
    assert np.all((0.0 < phi) & (phi <= 1.0))
    assert phi[12] == np.max(phi)  # cell 12 straddles the default center
    assert phi[0] == pytest.approx(np.exp(-abs(grid.centers()[0] - 1.0)))
    one = resolve_weight({"kind": "one"}, grid)
    assert np.all(one == 1.0)


# ---------------------------------------------------------------------------
# runners: refusals and special verdicts


def test_validate_runner_reports_all_checks():
    cfg = parse_config({"problem": bv_doc()["problem"],
                        "grid": {"cells": 40, "domain_length": 2.0},
                        "experiment": {"kind": "validate"}}, "validate")
    report, figures = run_validate(cfg)
    assert report.passed
    assert figures == []
    names = {r["name"] for r in report.rows if r["kind"] == "check"}
    assert "A3_flux_lipschitz" in names


def test_bv_refuses_x_dependent_noise():
    doc = bv_doc()
    doc["problem"]["sigma"] = {"kind": "linear_x", "scale": 0.1,
                               "amplitude": 0.5}
    cfg = parse_config(doc, "bv")
    with pytest.raises(InvalidArgumentError):
        run_bv(cfg)


def test_rate_degenerate_sweep_verdict():
    doc = base_doc("rate", epsilons=[0.2, 0.1, 0.05, 0.025],
                   reference_refine=2, reference_eps_factor=0.1)
    doc["problem"]["flux"] = {"kind": "zero"}
    doc["problem"]["eta"] = {"kind": "zero"}
    doc["problem"]["measure"] = {"atoms": []}
    doc["problem"]["initial"] = {"kind": "constant", "value": 1.0}
    cfg = parse_config(doc, "rate")
    report, _ = run_viscosity_rate(cfg)
    slope_row = next(r for r in report.rows if r["name"] == "rate_slope")
    assert slope_row["passed"] is False
    assert slope_row["value"] == "degenerate sweep"
    assert not report.passed


def test_rate_rejects_coarser_reference():
    doc = base_doc("rate", epsilons=[0.2, 0.1, 0.05, 0.025],
                   reference_refine=0.5)
    cfg = parse_config(doc, "rate")
    with pytest.raises(InvalidArgumentError, match="reference"):
        run_viscosity_rate(cfg)


def test_rate_rejects_short_sweep():
    doc = base_doc("rate", epsilons=[0.2, 0.1, 0.05])
    cfg = parse_config(doc, "rate")
    with pytest.raises(InvalidArgumentError, match="at least 4"):
        run_viscosity_rate(cfg)


def test_cdep_zero_perturbation_is_bit_exact():
    doc = base_doc("cdep", channel="sigma", h_values=[0.0, 0.1, 0.2, 0.4],
                   epsilon=0.02)
    cfg = parse_config(doc, "cdep")
    report, _ = run_continuous_dependence(cfg)
    zero = next(r for r in report.rows if r["name"] == "cdep_zero_distance")
    assert zero["passed"] is True
    row = next(r for r in report.rows if r["name"] == "distance_h=0")
    assert row["mean"] == 0.0
    assert row["var"] == 0.0


def test_cdep_rejects_unknown_channel():
    doc = base_doc("cdep", channel="viscosity", h_values=[0.0, 0.1, 0.2])
    with pytest.raises(ConfigError):
        parse_config(doc, "cdep")


def test_fracbv_rejects_boundary_window():
    doc = base_doc("fracbv", epsilon=0.01, deltas=[0.1, 0.2, 0.3, 0.4],
                   window={"x_lo": 0.0, "x_hi": 1.5}, slope_min=0.2)
    doc["problem"]["sigma"] = {"kind": "linear_x", "scale": 0.1,
                               "amplitude": 0.5}
    cfg = parse_config(doc, "fracbv")
    with pytest.raises(InvalidArgumentError):
        run_fractional_bv(cfg)


def test_fracbv_rejects_subgrid_delta():
    doc = base_doc("fracbv", epsilon=0.01, deltas=[0.01, 0.2, 0.3, 0.4],
                   window={"x_lo": 0.5, "x_hi": 1.5}, slope_min=0.2)
    cfg = parse_config(doc, "fracbv")  # dx = 0.05 > smallest delta
    with pytest.raises(InvalidArgumentError):
        run_fractional_bv(cfg)


# ---------------------------------------------------------------------------
# report emission


def test_report_passed_requires_verdicts():
    report = Report(experiment="demo", config={})
    assert not report.passed
    report.rows.append(value_row("x", 1.0))
    assert not report.passed
    report.rows.append(verdict_row("ok", True))
    assert report.passed


def test_emit_report_writes_stable_csv(tmp_path):
    report = Report(experiment="demo", config={"a": 1})
    report.rows.append(value_row("x", 0.1))
    report.rows.append(verdict_row("ok", True, detail="fine"))
    json_path, csv_path = emit_report(report, tmp_path / "out")
    doc = json.loads(json_path.read_text())
    assert doc["experiment"] == "demo"
    assert doc["passed"] is True
    lines = csv_path.read_text().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert lines[1].startswith("value,x")
    assert "0.1" in lines[1]
    assert lines[2].startswith("verdict,ok")
    assert "true" in lines[2]


def test_emit_report_wraps_io_failure(tmp_path):
    blocker = tmp_path / "blocked"
    blocker.write_text("file, not a directory")
    report = Report(experiment="demo", config={})
    with pytest.raises(OSError, match="blocked"):
        emit_report(report, blocker / "sub")


# ---------------------------------------------------------------------------
# CLI end-to-end


def test_cli_validate_exits_zero(tmp_path):
    doc = {"problem": bv_doc()["problem"],
           "grid": {"cells": 40, "domain_length": 2.0},
           "experiment": {"kind": "validate"}}
    cfg = write_doc(tmp_path, doc)
    out = tmp_path / "out"
    assert main(["validate", "--config", str(cfg), "--out", str(out)]) == 0
    assert (out / "report.json").exists()
    assert (out / "summary.csv").exists()


def test_cli_validation_failure_exits_one(tmp_path):
    doc = {"problem": bv_doc()["problem"],
           "grid": {"cells": 40, "domain_length": 2.0},
           "experiment": {"kind": "validate"}}
    doc["problem"]["eta"] = {"kind": "linear", "scale": 1.2}  # lambda* >= 1
    cfg = write_doc(tmp_path, doc)
    assert main(["validate", "--config", str(cfg),
                 "--out", str(tmp_path / "out")]) == 1


def test_cli_config_error_exits_two(tmp_path):
    doc = bv_doc()
    doc["surprise"] = 1
    cfg = write_doc(tmp_path, doc)
    assert main(["bv", "--config", str(cfg),
                 "--out", str(tmp_path / "out")]) == 2


def test_cli_missing_config_exits_two(tmp_path):
    assert main(["bv", "--config", str(tmp_path / "none.json"),
                 "--out", str(tmp_path / "out")]) == 2


def test_cli_hypothesis_violation_exits_two(tmp_path):
    doc = bv_doc()
    doc["problem"]["sigma"] = {"kind": "linear_x", "scale": 0.1,
                               "amplitude": 0.5}
    cfg = write_doc(tmp_path, doc)
    assert main(["bv", "--config", str(cfg),
                 "--out", str(tmp_path / "out")]) == 2


def test_cli_unwritable_out_exits_two(tmp_path):
    blocker = tmp_path / "blocked"
    blocker.write_text("in the way")
    doc = {"problem": bv_doc()["problem"],
           "grid": {"cells": 40, "domain_length": 2.0},
           "experiment": {"kind": "validate"}}
    cfg = write_doc(tmp_path, doc)
    assert main(["validate", "--config", str(cfg),
                 "--out", str(blocker / "sub")]) == 2


def test_cli_bv_run_outputs(tmp_path):
    cfg = write_doc(tmp_path, bv_doc())
    out = tmp_path / "out"
    rc = main(["bv", "--config", str(cfg), "--out", str(out), "--snapshots"])
    assert rc == 0
    assert (out / "report.json").exists()
    snaps = list((out / "snapshots").glob("*.csv"))
    assert snaps, "expected snapshot CSVs"
    figs = list((out / "figures").glob("*.png"))
    assert figs, "expected rendered figures"
    header = (out / "summary.csv").read_text().splitlines()[0]
    assert header == ",".join(CSV_COLUMNS)


def test_cli_no_figures_flag(tmp_path):
    cfg = write_doc(tmp_path, bv_doc())
    out = tmp_path / "out"
    assert main(["bv", "--config", str(cfg), "--out", str(out),
                 "--no-figures"]) == 0
    assert not (out / "figures").exists()


def test_cli_seed_and_paths_overrides_echoed(tmp_path):
    cfg = write_doc(tmp_path, bv_doc())
    out = tmp_path / "out"
    assert main(["bv", "--config", str(cfg), "--out", str(out),
                 "--seed", "99", "--paths", "6"]) == 0
    doc = json.loads((out / "report.json").read_text())
    assert doc["config"]["mc"]["base_seed"] == 99
    assert doc["config"]["mc"]["n_paths"] == 6
    est = next(r for r in doc["rows"] if r["kind"] == "estimate")
    assert est["seed"] == 99


def test_cli_thread_count_does_not_change_bytes(tmp_path):
    cfg = write_doc(tmp_path, bv_doc())
    outs = []
    for threads, tag in ((1, "a"), (8, "b")):
        out = tmp_path / tag
        assert main(["bv", "--config", str(cfg), "--out", str(out),
                     "--threads", str(threads), "--no-figures"]) == 0
        outs.append((out / "summary.csv").read_bytes())
    assert outs[0] == outs[1]


def test_cli_rerun_is_byte_identical(tmp_path):
    doc = base_doc("fracbv", epsilon=0.01, deltas=[0.2, 0.3, 0.4, 0.5],
                   window={"x_lo": 0.5, "x_hi": 1.5}, slope_min=0.0)
    doc["problem"]["sigma"] = {"kind": "linear_x", "scale": 0.1,
                               "amplitude": 0.5}
    cfg = write_doc(tmp_path, doc)
    blobs = []
    for tag in ("a", "b"):
        out = tmp_path / tag
        main(["fracbv", "--config", str(cfg), "--out", str(out),
              "--no-figures"])
        blobs.append((out / "summary.csv").read_bytes())
    assert blobs[0] == blobs[1]


def test_cli_echoed_config_reruns_to_same_verdicts(tmp_path):
    cfg = write_doc(tmp_path, bv_doc())
    out1 = tmp_path / "o1"
    assert main(["bv", "--config", str(cfg), "--out", str(out1),
                 "--no-figures"]) == 0
    echoed = json.loads((out1 / "report.json").read_text())["config"]
    cfg2 = write_doc(tmp_path, echoed, name="echo.json")
    out2 = tmp_path / "o2"
    assert main(["bv", "--config", str(cfg2), "--out", str(out2),
                 "--no-figures"]) == 0
    assert (out1 / "summary.csv").read_bytes() == \
        (out2 / "summary.csv").read_bytes()
