"""Strict JSON run configuration: parsing, selector tables, problem assembly.

The config is a single JSON object with blocks `problem`, `grid`, `time`,
`mc`, and `experiment`.  Unknown keys anywhere are errors, so typos never
silently fall back to defaults.  Coefficients and initial profiles are named
selectors with parameters; `build_problem` resolves them into a ProblemSpec
at any grid resolution, which lets the rate driver rebuild the same problem
on a finer reference grid.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from ..errors import ConfigError
from ..model import (BrownianCoefficient, Coefficient, JumpCoefficient,
                     ProblemSpec)
from ..noise import LevyMeasure
from ..solver import Grid

EXPERIMENT_KINDS = ("validate", "oracle", "bv", "rate", "cdep", "fracbv")

_GOLDEN = 0.618033988749895


def load_config(path) -> dict:
    """Read a JSON config file; parse problems become config errors."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {p} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"config {p} must be a JSON object at the top level")
    return doc


def _check_keys(block, where: str, required=(), optional=()):
    if not isinstance(block, dict):
        raise ConfigError(f"{where} must be a JSON object")
    allowed = set(required) | set(optional)
    unknown = sorted(set(block) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(unknown)}")
    missing = sorted(set(required) - set(block))
    if missing:
        raise ConfigError(f"missing key(s) in {where}: {', '.join(missing)}")


def _number(block: dict, key: str, where: str, positive=False,
            nonnegative=False) -> float:
    v = block[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) \
            or not math.isfinite(v):
        raise ConfigError(f"{where}.{key} must be a finite number, got {v!r}")
    if positive and not v > 0:
        raise ConfigError(f"{where}.{key} must be positive, got {v}")
    if nonnegative and v < 0:
        raise ConfigError(f"{where}.{key} must be nonnegative, got {v}")
    return float(v)


def _integer(block: dict, key: str, where: str, minimum=None) -> int:
    v = block[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{where}.{key} must be an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise ConfigError(f"{where}.{key} must be >= {minimum}, got {v}")
    return int(v)


def _number_list(block: dict, key: str, where: str, positive=False,
                 min_len=1) -> list[float]:
    v = block[key]
    if not isinstance(v, list) or len(v) < min_len:
        raise ConfigError(
            f"{where}.{key} must be a list with at least {min_len} entries")
    out = []
    for i, item in enumerate(v):
        if isinstance(item, bool) or not isinstance(item, (int, float)) \
                or not math.isfinite(item):
            raise ConfigError(f"{where}.{key}[{i}] must be a finite number")
        if positive and not item > 0:
            raise ConfigError(f"{where}.{key}[{i}] must be positive")
        out.append(float(item))
    return out


def _selector(block: dict, where: str, kinds: dict) -> dict:
    """Validate a {kind, ...params} selector against a kind table."""
    if not isinstance(block, dict) or "kind" not in block:
        raise ConfigError(f"{where} must be an object with a 'kind' key")
    kind = block["kind"]
    if kind not in kinds:
        raise ConfigError(
            f"{where}.kind {kind!r} is not one of {sorted(kinds)}")
    required, optional = kinds[kind]
    _check_keys(block, where, required=("kind",) + required,
                optional=optional)
    return block


_FLUX_KINDS = {
    "zero": ((), ()),
    "linear": (("scale",), ()),
    "burgers": (("scale",), ()),
}
_DIFFUSION_KINDS = {
    "zero": ((), ()),
    "linear": (("scale",), ()),
    "pospart_quadratic": (("scale", "threshold"), ()),
    "ramp": (("scale", "threshold"), ()),
}
_SIGMA_KINDS = {
    "zero": ((), ()),
    "linear": (("scale",), ()),
    "linear_x": (("scale", "amplitude"), ()),
}
_ETA_KINDS = {
    "zero": ((), ()),
    "linear": (("scale",), ()),
    "linear_x": (("scale", "amplitude"), ()),
}
_INITIAL_KINDS = {
    "constant": (("value",), ()),
    "square_wave": (("inside", "outside", "left", "right"), ()),
    "gaussian": (("amplitude", "center", "width"), ("offset",)),
    "sine": (("amplitude", "mean", "periods"), ()),
    "weierstrass": (("amplitude", "mean", "octaves", "roughness"), ()),
}
_WEIGHT_KINDS = {
    "one": ((), ()),
    "exp_window": ((), ("center", "rate")),
}


@dataclass
class RunConfig:
    """Parsed, validated run configuration."""

    kind: str
    raw: dict
    problem: dict | None
    grid_cells: int
    domain_length: float
    T: float
    safety: float
    output_times: list[float] | None
    n_paths: int
    base_seed: int
    experiment: dict = field(default_factory=dict)


def parse_config(doc: dict, expected_kind: str | None = None) -> RunConfig:
    _check_keys(doc, "config",
                optional=("problem", "grid", "time", "mc", "experiment"))

    exp_block = doc.get("experiment")
    if exp_block is not None:
        if not isinstance(exp_block, dict) or "kind" not in exp_block:
            raise ConfigError("experiment must be an object with a 'kind' key")
        kind = exp_block["kind"]
        if not isinstance(kind, str) or kind not in EXPERIMENT_KINDS:
            raise ConfigError(
                f"experiment.kind must be one of {EXPERIMENT_KINDS}, got {kind!r}")
    else:
        if expected_kind in ("validate", "oracle"):
            kind = expected_kind
            exp_block = {"kind": kind}
        else:
            raise ConfigError("experiment block is required")
    if expected_kind is not None and kind != expected_kind:
        raise ConfigError(
            f"experiment.kind {kind!r} does not match the requested "
            f"command {expected_kind!r}")

    needs_problem = kind != "oracle"
    needs_time = kind in ("bv", "rate", "cdep", "fracbv")
    for block_name, needed in (("problem", needs_problem),
                               ("grid", needs_problem),
                               ("time", needs_time), ("mc", needs_time)):
        if needed and block_name not in doc:
            raise ConfigError(f"{kind} runs require a '{block_name}' block")

    problem = None
    if "problem" in doc:
        problem = _parse_problem(doc["problem"])

    cells, length = 0, 1.0
    if "grid" in doc:
        g = doc["grid"]
        _check_keys(g, "grid", required=("cells", "domain_length"))
        cells = _integer(g, "cells", "grid", minimum=4)
        length = _number(g, "domain_length", "grid", positive=True)

    T, safety, output_times = 0.0, 0.5, None
    if "time" in doc:
        t = doc["time"]
        _check_keys(t, "time", required=("T",),
                    optional=("safety", "output_times"))
        T = _number(t, "T", "time", positive=True)
        if "safety" in t:
            safety = _number(t, "safety", "time", positive=True)
            if safety > 1.0:
                raise ConfigError(f"time.safety must lie in (0, 1], got {safety}")
        if "output_times" in t:
            output_times = _number_list(t, "output_times", "time", min_len=1)
            bad = [v for v in output_times if v < 0 or v > T + 1e-12]
            if bad:
                raise ConfigError(
                    f"time.output_times entries must lie in [0, T]: {bad}")

    n_paths, base_seed = 64, 2026
    if "mc" in doc:
        m = doc["mc"]
        _check_keys(m, "mc", required=("n_paths", "base_seed"))
        n_paths = _integer(m, "n_paths", "mc", minimum=2)
        base_seed = _integer(m, "base_seed", "mc", minimum=0)

    experiment = _parse_experiment(kind, exp_block)
    return RunConfig(kind=kind, raw=doc, problem=problem, grid_cells=cells,
                     domain_length=length, T=T, safety=safety,
                     output_times=output_times, n_paths=n_paths,
                     base_seed=base_seed, experiment=experiment)


def _parse_problem(block) -> dict:
    _check_keys(block, "problem",
                required=("flux", "diffusion", "sigma", "eta", "measure",
                          "initial"),
                optional=("u_bound",))
    _selector(block["flux"], "problem.flux", _FLUX_KINDS)
    _selector(block["diffusion"], "problem.diffusion", _DIFFUSION_KINDS)
    _selector(block["sigma"], "problem.sigma", _SIGMA_KINDS)
    _selector(block["eta"], "problem.eta", _ETA_KINDS)
    for name in ("flux", "diffusion", "sigma", "eta"):
        sel = block[name]
        for key in ("scale", "amplitude", "threshold"):
            if key in sel:
                _number(sel, key, f"problem.{name}",
                        nonnegative=(key != "amplitude"))
    meas = block["measure"]
    _check_keys(meas, "problem.measure", required=("atoms",))
    atoms = meas["atoms"]
    if not isinstance(atoms, list):
        raise ConfigError("problem.measure.atoms must be a list of [z, w] pairs")
    for i, pair in enumerate(atoms):
        if (not isinstance(pair, list) or len(pair) != 2
                or any(isinstance(v, bool) or not isinstance(v, (int, float))
                       for v in pair)):
            raise ConfigError(
                f"problem.measure.atoms[{i}] must be a [z, w] number pair")
        if pair[0] == 0 or pair[1] <= 0:
            raise ConfigError(
                f"problem.measure.atoms[{i}] needs z != 0 and weight > 0")
    init = _selector(block["initial"], "problem.initial", _INITIAL_KINDS)
    for key in init:
        if key == "kind":
            continue
        if key == "octaves":
            _integer(init, key, "problem.initial", minimum=1)
        else:
            _number(init, key, "problem.initial")
    if "u_bound" in block:
        _number({"u_bound": block["u_bound"]}, "u_bound", "problem",
                positive=True)
    return block


def _parse_experiment(kind: str, block: dict) -> dict:
    exp = dict(block)
    if kind == "validate":
        _check_keys(block, "experiment", required=("kind",))
    elif kind == "oracle":
        _check_keys(block, "experiment", required=("kind",))
    elif kind == "bv":
        _check_keys(block, "experiment", required=("kind", "epsilons"),
                    optional=("tol_bv", "moment_factor", "l1_factor"))
        exp["epsilons"] = _number_list(block, "epsilons", "experiment",
                                       positive=True)
        exp.setdefault("tol_bv", 0.05)
        exp.setdefault("moment_factor", 2.0)
        exp.setdefault("l1_factor", 1.1)
    elif kind == "rate":
        _check_keys(block, "experiment", required=("kind", "epsilons"),
                    optional=("slope_window", "reference_refine",
                              "reference_eps_factor"))
        exp["epsilons"] = _number_list(block, "epsilons", "experiment",
                                       positive=True)
        exp.setdefault("slope_window", [0.4, 1.2])
        exp.setdefault("reference_refine", 4)
        exp.setdefault("reference_eps_factor", 0.1)
        _validate_window(exp["slope_window"], "experiment.slope_window")
        if isinstance(exp["reference_refine"], bool) or \
                not isinstance(exp["reference_refine"], (int, float)) \
                or exp["reference_refine"] <= 0:
            raise ConfigError("experiment.reference_refine must be positive")
        _number(exp, "reference_eps_factor", "experiment", positive=True)
    elif kind == "cdep":
        _check_keys(block, "experiment",
                    required=("kind", "channel", "h_values"),
                    optional=("epsilon", "slope_window", "weight"))
        channel = block["channel"]
        if not isinstance(channel, str) or channel not in (
                "flux", "diffusion", "sigma", "eta"):
            raise ConfigError(
                "experiment.channel must name exactly one of "
                "'flux', 'diffusion', 'sigma', 'eta'")
        exp["h_values"] = _number_list(block, "h_values", "experiment")
        if any(h < 0 for h in exp["h_values"]):
            raise ConfigError("experiment.h_values must be nonnegative sizes")
        exp.setdefault("epsilon", 0.01)
        _number(exp, "epsilon", "experiment", nonnegative=True)
        if "slope_window" in exp:
            _validate_window(exp["slope_window"], "experiment.slope_window")
        else:
            exp["slope_window"] = [0.9, 1.1] if channel == "flux" \
                else [0.4, None]
        if "weight" in exp:
            _selector(exp["weight"], "experiment.weight", _WEIGHT_KINDS)
        else:
            exp["weight"] = {"kind": "exp_window"}
    elif kind == "fracbv":
        _check_keys(block, "experiment",
                    required=("kind", "deltas", "window"),
                    optional=("epsilon", "slope_min"))
        exp["deltas"] = _number_list(block, "deltas", "experiment",
                                     positive=True)
        w = block["window"]
        _check_keys(w, "experiment.window", required=("x_lo", "x_hi"))
        _number(w, "x_lo", "experiment.window")
        _number(w, "x_hi", "experiment.window")
        exp.setdefault("epsilon", 0.01)
        _number(exp, "epsilon", "experiment", nonnegative=True)
        exp.setdefault("slope_min", 0.2)
        _number(exp, "slope_min", "experiment")
    return exp


def _validate_window(window, where: str):
    if (not isinstance(window, list) or len(window) != 2
            or any(v is not None and (isinstance(v, bool)
                                      or not isinstance(v, (int, float)))
                   for v in window)):
        raise ConfigError(f"{where} must be a [lo, hi] pair (hi may be null)")
    lo, hi = window
    if lo is None:
        raise ConfigError(f"{where} lower edge is required")
    if hi is not None and hi <= lo:
        raise ConfigError(f"{where} must satisfy lo < hi")


# ---------------------------------------------------------------------------
# selector resolution


def _resolve_flux(sel: dict, u_bound: float) -> Coefficient:
    kind = sel["kind"]
    if kind == "zero":
        return Coefficient(lambda u: np.zeros_like(np.asarray(u, dtype=float)),
                           lipschitz=0.0, second_derivative_bound=0.0,
                           name="zero")
    if kind == "linear":
        c = float(sel["scale"])
        return Coefficient(lambda u: c * np.asarray(u, dtype=float),
                           lipschitz=c, second_derivative_bound=0.0,
                           name="linear")
    a = float(sel["scale"])
    return Coefficient(lambda u: a * np.asarray(u, dtype=float) ** 2,
                       lipschitz=2.0 * a * u_bound,
                       second_derivative_bound=2.0 * a, name="burgers")


def _resolve_diffusion(sel: dict, u_bound: float) -> Coefficient:
    kind = sel["kind"]
    if kind == "zero":
        return Coefficient(lambda u: np.zeros_like(np.asarray(u, dtype=float)),
                           lipschitz=0.0, second_derivative_bound=0.0,
                           name="zero")
    if kind == "linear":
        a = float(sel["scale"])
        return Coefficient(lambda u: a * np.asarray(u, dtype=float),
                           lipschitz=a, second_derivative_bound=0.0,
                           name="linear")
    a = float(sel["scale"])
    c = float(sel["threshold"])
    if c < 0:
        raise ConfigError(
            "problem.diffusion.threshold must be >= 0 so the diffusion "
            "vanishes at the origin")
    if kind == "pospart_quadratic":
        return Coefficient(
            lambda u: a * np.maximum(np.asarray(u, dtype=float) - c, 0.0) ** 2,
            lipschitz=2.0 * a * max(u_bound - c, 0.0),
            second_derivative_bound=2.0 * a, name="pospart_quadratic")
    return Coefficient(
        lambda u: a * np.maximum(np.asarray(u, dtype=float) - c, 0.0),
        lipschitz=a, second_derivative_bound=None, name="ramp")


def _resolve_sigma(sel: dict, u_bound: float, L: float) -> BrownianCoefficient:
    kind = sel["kind"]
    if kind == "zero":
        return BrownianCoefficient.from_u(
            lambda u: np.zeros_like(np.asarray(u, dtype=float)), 0.0,
            name="zero")
    lam = float(sel["scale"])
    if kind == "linear":
        return BrownianCoefficient.from_u(
            lambda u: lam * np.asarray(u, dtype=float), lam, name="linear")
    b = float(sel["amplitude"])
    omega = 2.0 * math.pi / L
    lip = max(lam * (1.0 + abs(b)), lam * abs(b) * omega * u_bound)
    return BrownianCoefficient(
        fn=lambda x, u: (1.0 + b * np.sin(omega * np.asarray(x, dtype=float)))
        * lam * np.asarray(u, dtype=float),
        lipschitz=lip, x_dependent=True, name="linear_x")


def _resolve_eta(sel: dict, u_bound: float, L: float) -> JumpCoefficient:
    kind = sel["kind"]
    if kind == "zero":
        return JumpCoefficient.from_u(
            lambda u, z: np.zeros_like(np.asarray(u, dtype=float)),
            lambda_star=0.5, linear_bound=0.0, name="zero")
    gam = float(sel["scale"])
    if kind == "linear":
        return JumpCoefficient.from_u(
            lambda u, z: gam * np.asarray(u, dtype=float) * min(1.0, abs(z)),
            lambda_star=gam, linear_bound=gam, name="linear")
    b = float(sel["amplitude"])
    omega = 2.0 * math.pi / L
    modulation = lambda x: 1.0 + b * np.sin(omega * np.asarray(x, dtype=float))
    lam_star = gam * (1.0 + abs(b))
    return JumpCoefficient(
        fn=lambda x, u, z: modulation(x) * gam * np.asarray(u, dtype=float)
        * min(1.0, abs(z)),
        lambda_star=lam_star, linear_bound=lam_star, x_dependent=True,
        x_lipschitz=gam * abs(b) * omega * u_bound,
        envelope=lambda x: gam * modulation(x), name="linear_x")


def _resolve_initial(sel: dict, L: float) -> Callable:
    kind = sel["kind"]
    if kind == "constant":
        v = float(sel["value"])
        return lambda x: np.full_like(np.asarray(x, dtype=float), v)
    if kind == "square_wave":
        inside = float(sel["inside"])
        outside = float(sel["outside"])
        left, right = float(sel["left"]), float(sel["right"])
        if not (0.0 <= left < right <= L):
            raise ConfigError(
                "problem.initial square_wave needs 0 <= left < right <= L")
        return lambda x: np.where(
            (np.asarray(x, dtype=float) >= left)
            & (np.asarray(x, dtype=float) < right), inside, outside)
    if kind == "gaussian":
        a = float(sel["amplitude"])
        c = float(sel["center"])
        w = float(sel["width"])
        o = float(sel.get("offset", 0.0))
        if w <= 0:
            raise ConfigError("problem.initial gaussian needs width > 0")
        return lambda x: o + a * np.exp(
            -0.5 * ((np.asarray(x, dtype=float) - c) / w) ** 2)
    if kind == "sine":
        a = float(sel["amplitude"])
        mean = float(sel["mean"])
        k = float(sel["periods"])
        return lambda x: mean + a * np.sin(
            2.0 * math.pi * k * np.asarray(x, dtype=float) / L)
    a = float(sel["amplitude"])
    mean = float(sel["mean"])
    octaves = int(sel["octaves"])
    rough = float(sel["roughness"])

    def weier(x):
        x = np.asarray(x, dtype=float)
        out = np.full_like(x, mean)
        for k in range(octaves):
            phase = 2.0 * math.pi * (((k + 1) * _GOLDEN) % 1.0)
            out = out + a * 2.0 ** (-k * rough) * np.cos(
                2.0 * math.pi * (2 ** k) * x / L + phase)
        return out

    return weier


def resolve_weight(sel: dict, grid: Grid) -> np.ndarray:
    """Cell values of the L1 weight, clipped to [0, 1]."""
    x = grid.centers()
    if sel["kind"] == "one":
        return np.ones_like(x)
    center = float(sel.get("center", grid.domain_length / 2.0))
    rate = float(sel.get("rate", 1.0))
    return np.minimum(1.0, np.exp(-rate * np.abs(x - center)))


def build_problem(cfg: RunConfig, cells: int | None = None
                  ) -> tuple[ProblemSpec, float]:
    """Resolve the problem block into a ProblemSpec on the requested grid.

    Returns the ProblemSpec together with the evaluation bound used for declared
    Lipschitz constants (configured u_bound, defaulting to
    max(1, 2 max|u0|)).
    """
    if cfg.problem is None:
        raise ConfigError("this run needs a 'problem' block")
    n = cfg.grid_cells if cells is None else int(cells)
    L = cfg.domain_length
    grid = Grid(cells=n, domain_length=L)
    profile = _resolve_initial(cfg.problem["initial"], L)
    u0 = np.asarray(profile(grid.centers()), dtype=float)
    u_bound = cfg.problem.get("u_bound")
    if u_bound is None:
        u_bound = max(1.0, 2.0 * float(np.max(np.abs(u0))))
    u_bound = float(u_bound)
    atoms = tuple((float(z), float(w)) for z, w in cfg.problem["measure"]["atoms"])
    spec = ProblemSpec(
        f=_resolve_flux(cfg.problem["flux"], u_bound),
        A=_resolve_diffusion(cfg.problem["diffusion"], u_bound),
        sigma=_resolve_sigma(cfg.problem["sigma"], u_bound, L),
        eta=_resolve_eta(cfg.problem["eta"], u_bound, L),
        m=LevyMeasure(atoms=atoms),
        u0=u0, domain_length=L, cells=n)
    return spec, u_bound
