"""The six experiment drivers.

Each driver takes a parsed RunConfig, runs its Monte Carlo sweeps with
deterministic per-path streams, and returns a Report plus figure
descriptions.  Drivers refuse configurations that violate the hypotheses of
the statement they probe (via validate_assumptions) instead of silently
running, and every verdict is computed from numbers recorded in the report.
"""

from __future__ import annotations

import math
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from ..errors import ConfigError, InvalidArgumentError
from ..estimators import (EstimateSummary, _monte_carlo_multi, fit_rate,
                          monte_carlo, shift_modulus, total_variation,
                          weighted_l1_distance)
from ..model import (BrownianCoefficient, Coefficient, JumpCoefficient,
                     ProblemSpec, functional_D, functional_E,
                     validate_assumptions, zero_brownian, zero_flux,
                     zero_jump)
from ..noise import LevyMeasure, make_noise_path
from ..solver import (Grid, snapshot_times, solve_coupled, solve_path,
                      stable_dt, write_snapshots)
from .config import RunConfig, build_problem, resolve_weight
from .report import (Report, check_row, estimate_row, fit_row, value_row,
                     verdict_row)


def _steps_for(T: float, dt_max: float) -> tuple[float, int]:
    """Largest uniform step count fitting T under the stability bound."""
    n = max(1, int(math.ceil(T / dt_max - 1e-12)))
    return T / n, n


def _refuse_invalid(spec: ProblemSpec, u_bound: float, what: str):
    rep = validate_assumptions(spec, u_bound=u_bound)
    if not rep.passed:
        names = ", ".join(c.name for c in rep.failures())
        raise ConfigError(
            f"{what} violates the assumptions it relies on: {names}")
    return rep


def _l1(u: np.ndarray, dx: float) -> float:
    return float(np.sum(np.abs(u)) * dx)


def _l2sq(u: np.ndarray, dx: float) -> float:
    return float(np.sum(u * u) * dx)


def _meta(started: float, cfg: RunConfig, threads: int, extra=None) -> dict:
    meta = {"wall_seconds": time.perf_counter() - started,
            "threads": threads, "n_paths": cfg.n_paths,
            "base_seed": cfg.base_seed}
    if extra:
        meta.update(extra)
    return meta


def _maybe_snapshots(snapshots_dir, spec, grid, eps, dt, n_steps, times,
                     base_seed):
    if snapshots_dir is None:
        return
    path = make_noise_path(spec.m, base_seed, 0, dt, n_steps)
    traj = solve_path(spec, grid, eps, path, times, diagnostics=False)
    write_snapshots(traj, grid, snapshots_dir)


# ---------------------------------------------------------------------------
# validate


def run_validate(cfg: RunConfig, threads: int = 1, snapshots_dir=None
                 ) -> tuple[Report, list[dict]]:
    started = time.perf_counter()
    spec, u_bound = build_problem(cfg)
    rep = validate_assumptions(spec, u_bound=u_bound)
    rows = [value_row("u_bound", u_bound,
                      detail="evaluation range for declared constants")]
    rows += [check_row(c) for c in rep.checks]
    report = Report(experiment="validate", config=cfg.raw, rows=rows,
                    meta=_meta(started, cfg, threads))
    return report, []


# ---------------------------------------------------------------------------
# oracle suite


def _const_spec(cells: int, value: float, sigma, eta, m: LevyMeasure
                ) -> ProblemSpec:
    return ProblemSpec(f=zero_flux(), A=zero_flux(), sigma=sigma, eta=eta,
                       m=m, u0=np.full(cells, value), domain_length=1.0,
                       cells=cells)


def run_oracles(cfg: RunConfig, threads: int = 1, snapshots_dir=None
                ) -> tuple[Report, list[dict]]:
    started = time.perf_counter()
    seed = cfg.base_seed
    rows: list[dict] = []
    figures: list[dict] = []
    empty_m = LevyMeasure(atoms=())

    # transport: du = d_x(c u) dt moves the profile left at speed c; the
    # upwinded scheme is first order, so the L1 error decays like dx.
    c = 1.0
    points = []
    for cells in (32, 64, 128, 256):
        grid = Grid(cells=cells, domain_length=1.0)
        x = grid.centers()
        u0 = 0.5 + 0.25 * np.sin(2.0 * math.pi * x)
        spec = ProblemSpec(
            f=Coefficient(lambda u: c * np.asarray(u, dtype=float),
                          lipschitz=c, second_derivative_bound=0.0,
                          name="linear"),
            A=zero_flux(), sigma=zero_brownian(), eta=zero_jump(),
            m=empty_m, u0=u0, domain_length=1.0, cells=cells)
        dt, n = _steps_for(1.0, stable_dt(spec, grid, 0.0, safety=0.5))
        path = make_noise_path(empty_m, seed, 0, dt, n)
        traj = solve_path(spec, grid, 0.0, path, [1.0], diagnostics=False)
        err = _l1(traj.final.values - u0, grid.dx)
        points.append((grid.dx, err))
    transport_fit = fit_rate(points, name="transport_fit")
    rows.append(fit_row(transport_fit))
    rows.append(verdict_row(
        "oracle_transport", transport_fit.slope >= 0.9,
        value=transport_fit.slope,
        detail="L1 self-error after one full period vs dx; need slope >= 0.9"))
    figures.append({
        "name": "oracle_transport", "points": [[p[0], p[1]] for p in points],
        "fit": [transport_fit.slope, transport_fit.intercept],
        "xlabel": "dx", "ylabel": "L1 error",
        "title": "transport oracle refinement"})

    # heat: pure diffusion dissipates the discrete L2 norm monotonically.
    grid = Grid(cells=128, domain_length=1.0)
    x = grid.centers()
    u0 = np.where((x >= 0.25) & (x < 0.75), 1.25, 0.25)
    spec = ProblemSpec(
        f=zero_flux(),
        A=Coefficient(lambda u: 0.5 * np.asarray(u, dtype=float),
                      lipschitz=0.5, second_derivative_bound=0.0,
                      name="linear"),
        sigma=zero_brownian(), eta=zero_jump(), m=empty_m, u0=u0,
        domain_length=1.0, cells=128)
    dt, n = _steps_for(0.05, stable_dt(spec, grid, 0.0, safety=0.5))
    path = make_noise_path(empty_m, seed, 0, dt, n)
    traj = solve_path(spec, grid, 0.0, path, [0.05], diagnostics=True)
    l2 = np.asarray(traj.diagnostics.l2)
    max_rise = float(np.max(np.diff(l2))) if len(l2) > 1 else 0.0
    rows.append(value_row("heat_max_l2_increase", max_rise,
                          detail="largest per-step increase of the L2 norm"))
    rows.append(verdict_row(
        "oracle_heat", max_rise <= 1e-12, value=max_rise,
        detail="discrete L2 norm must be non-increasing under diffusion"))

    # geometric Brownian: constant data with linear Brownian noise follows
    # the scalar SDE exactly; Euler-Maruyama converges strongly at order 1/2.
    lam, dt_gbm, horizon = 0.5, 1e-4, 1.0
    n_gbm = int(round(horizon / dt_gbm))
    sigma = BrownianCoefficient.from_u(
        lambda u: lam * np.asarray(u, dtype=float), lam, name="linear")
    gbm_spec = _const_spec(8, 1.0, sigma, zero_jump(), empty_m)
    gbm_grid = Grid(cells=8, domain_length=1.0)

    def gbm_error(i: int) -> float:
        p = make_noise_path(empty_m, seed, i, dt_gbm, n_gbm)
        traj = solve_path(gbm_spec, gbm_grid, 0.0, p, [horizon],
                          diagnostics=False)
        w_total = float(np.sum(p.brownian_increments))
        exact = math.exp(lam * w_total - 0.5 * lam * lam * horizon)
        return abs(float(traj.final.values[0]) - exact)

    gbm = monte_carlo(gbm_error, 64, seed, threads=threads, name="gbm_strong_error")
    gbm_tol = 10.0 * 1.0 * lam * lam * math.sqrt(dt_gbm)
    rows.append(estimate_row(gbm))
    rows.append(verdict_row(
        "oracle_gbm", gbm.mean <= gbm_tol, value=gbm.mean,
        detail=f"strong error vs closed form; need <= {gbm_tol!r}"))

    # jump exponential: compensated one-atom jumps on constant data follow a
    # closed-form stochastic exponential; only the drift is dt-discretized.
    gamma, z_atom, rate, dt_j, horizon_j = 0.4, 2.0, 1.5, 1e-3, 1.0
    kappa = min(1.0, abs(z_atom))
    m_jump = LevyMeasure(atoms=((z_atom, rate),))
    eta = JumpCoefficient.from_u(
        lambda u, z: gamma * np.asarray(u, dtype=float) * min(1.0, abs(z)),
        lambda_star=gamma, linear_bound=gamma, name="linear")
    jump_spec = _const_spec(8, 1.0, zero_brownian(), eta, m_jump)
    n_j = int(round(horizon_j / dt_j))

    def jump_rel_error(i: int) -> float:
        p = make_noise_path(m_jump, seed, i, dt_j, n_j)
        traj = solve_path(jump_spec, gbm_grid, 0.0, p, [horizon_j],
                          diagnostics=False)
        n_t = len(p.jumps)
        exact = math.exp(-gamma * kappa * rate * horizon_j) \
            * (1.0 + gamma * kappa) ** n_t
        return abs(float(traj.final.values[0]) - exact) / exact

    rel_errors = [jump_rel_error(i) for i in range(64)]
    worst = max(rel_errors)
    mean_rel = sum(rel_errors) / len(rel_errors)
    var_rel = sum((r - mean_rel) ** 2 for r in rel_errors) \
        / (len(rel_errors) - 1)
    jump = EstimateSummary(
        mean=mean_rel, variance=var_rel,
        half_width_95=1.96 * math.sqrt(var_rel / len(rel_errors)),
        n_paths=len(rel_errors), n_failed=0, base_seed=seed,
        name="jump_rel_error")
    rows.append(estimate_row(jump))
    rows.append(value_row("jump_worst_rel_error", worst,
                          detail="max over 64 paths"))
    rows.append(verdict_row(
        "oracle_jump", worst <= 5.0 * dt_j, value=worst,
        detail=f"per-path match to the stochastic exponential; "
               f"need <= {5.0 * dt_j!r}"))

    report = Report(experiment="oracle", config=cfg.raw, rows=rows,
                    meta=_meta(started, cfg, threads))
    return report, figures


# ---------------------------------------------------------------------------
# BV experiment


def run_bv(cfg: RunConfig, threads: int = 1, snapshots_dir=None
           ) -> tuple[Report, list[dict]]:
    started = time.perf_counter()
    spec, u_bound = build_problem(cfg)
    if spec.x_dependent_noise:
        raise InvalidArgumentError(
            "the BV bound needs x-independent noise coefficients; "
            "use the fracbv experiment for the x-dependent regime")
    _refuse_invalid(spec, u_bound, "bv problem")
    grid = Grid.for_spec(spec)
    exp = cfg.experiment
    eps_list = exp["epsilons"]
    times = cfg.output_times or [i * cfg.T / 8.0 for i in range(9)]
    tv0 = total_variation(spec.u0)
    l1_0 = _l1(spec.u0, grid.dx)

    rows = [value_row("tv_initial", tv0),
            value_row("l1_initial", l1_0)]
    figures: list[dict] = []
    tv_points = []
    supt_by_eps = []
    tv_ok, l1_ok = True, True
    meta_extra = {"dt": {}, "n_steps": {}}

    for j, eps in enumerate(eps_list):
        dt, n = _steps_for(cfg.T, stable_dt(spec, grid, eps, cfg.safety))
        meta_extra["dt"][f"{eps:g}"] = dt
        meta_extra["n_steps"][f"{eps:g}"] = n
        # requested times collapse onto step boundaries, so name the
        # snapshots the solver will actually record
        eff_times = snapshot_times(times, dt, n)

        def one(i: int) -> np.ndarray:
            path = make_noise_path(spec.m, cfg.base_seed, i, dt, n)
            traj = solve_path(spec, grid, eps, path, times,
                              diagnostics=False)
            u_T = traj.final.values
            l2s = [_l2sq(s.values, grid.dx) for s in traj.snapshots]
            return np.array([total_variation(u_T), _l1(u_T, grid.dx)] + l2s)

        names = [f"tv_final_eps={eps:g}", f"l1_final_eps={eps:g}"] \
            + [f"l2sq_eps={eps:g}_t={t:g}" for t in eff_times]
        summaries = _monte_carlo_multi(one, cfg.n_paths, cfg.base_seed,
                                       names, threads=threads)
        tv_s, l1_s = summaries[0], summaries[1]
        rows.append(estimate_row(tv_s))
        rows.append(estimate_row(l1_s))
        rows.extend(estimate_row(s) for s in summaries[2:])
        supt = max(s.mean for s in summaries[2:])
        rows.append(value_row(f"sup_t_l2sq_eps={eps:g}", supt,
                              detail="max over snapshot times of E||u||_2^2"))
        supt_by_eps.append(supt)
        tv_points.append([eps, tv_s.mean, tv_s.half_width_95])
        if not tv_s.mean <= tv0 * (1.0 + exp["tol_bv"]):
            tv_ok = False
        if not l1_s.mean <= l1_0 * exp["l1_factor"]:
            l1_ok = False
        if j == 0:
            _maybe_snapshots(snapshots_dir, spec, grid, eps, dt, n, times,
                             cfg.base_seed)

    rows.append(verdict_row(
        "bv_tv_bound", tv_ok,
        detail=f"E[TV(u(T))] <= TV(u0) * {1.0 + exp['tol_bv']!r} "
               f"for every epsilon"))
    baseline = supt_by_eps[0]
    factor = exp["moment_factor"]
    moment_ok = all(
        s <= factor * baseline and s >= baseline / factor
        for s in supt_by_eps)
    rows.append(verdict_row(
        "moment_uniform", moment_ok,
        detail=f"sup_t E||u||_2^2 within factor {factor!r} of the "
               f"largest-epsilon baseline"))
    rows.append(verdict_row(
        "l1_bound", l1_ok,
        detail=f"E||u(T)||_1 <= {exp['l1_factor']!r} * ||u0||_1"))

    figures.append({
        "name": "bv_tv_vs_eps", "points": tv_points,
        "hline": {"y": tv0, "label": "TV(u0)"},
        "xlabel": "epsilon", "ylabel": "E[TV(u(T))]", "yscale": "linear",
        "title": "uniform BV bound"})
    report = Report(experiment="bv", config=cfg.raw, rows=rows,
                    meta=_meta(started, cfg, threads, meta_extra))
    return report, figures


# ---------------------------------------------------------------------------
# viscosity rate


def run_viscosity_rate(cfg: RunConfig, threads: int = 1, snapshots_dir=None
                       ) -> tuple[Report, list[dict]]:
    started = time.perf_counter()
    exp = cfg.experiment
    eps_list = sorted(exp["epsilons"], reverse=True)
    if len(eps_list) < 4:
        raise InvalidArgumentError(
            f"the rate sweep needs at least 4 epsilon values, "
            f"got {len(eps_list)}")
    if len(set(eps_list)) != len(eps_list):
        raise InvalidArgumentError("epsilon sweep values must be distinct")

    spec, u_bound = build_problem(cfg)
    _refuse_invalid(spec, u_bound, "rate problem")
    grid = Grid.for_spec(spec)
    cells = grid.cells

    ref_cells = int(round(exp["reference_refine"] * cells))
    if ref_cells < cells:
        raise InvalidArgumentError(
            f"reference grid ({ref_cells} cells) is coarser than the sweep "
            f"grid ({cells} cells)")
    if ref_cells % cells != 0:
        raise InvalidArgumentError(
            "reference_refine must make the fine grid an integer multiple "
            "of the sweep grid")
    block = ref_cells // cells
    eps_ref = exp["reference_eps_factor"] * min(eps_list)
    if eps_ref > min(eps_list) / 10.0 + 1e-15:
        raise InvalidArgumentError(
            f"reference epsilon {eps_ref} must be <= min(sweep)/10")
    spec_ref, _ = build_problem(cfg, cells=ref_cells)
    grid_ref = Grid.for_spec(spec_ref)

    dt_members = min(stable_dt(spec, grid, e, cfg.safety) for e in eps_list)
    dt_ref_max = stable_dt(spec_ref, grid_ref, eps_ref, cfg.safety)
    n_min = max(1, int(math.ceil(cfg.T / dt_members - 1e-12)))
    n_coarse = 16 * int(math.ceil(n_min / 16.0))
    dt_coarse = cfg.T / n_coarse
    k = 1
    while dt_coarse / k > dt_ref_max:
        k *= 2
    n_fine = k * n_coarse
    dt_fine = cfg.T / n_fine

    phi = np.ones(cells)

    def one(i: int) -> np.ndarray:
        master = make_noise_path(spec.m, cfg.base_seed, i, dt_fine, n_fine)
        ref = solve_path(spec_ref, grid_ref, eps_ref, master, [cfg.T],
                         diagnostics=False)
        uref = ref.final.values.reshape(cells, block).mean(axis=1)
        member_path = master.coarsen(k) if k > 1 else master
        errs = []
        for e in eps_list:
            traj = solve_path(spec, grid, e, member_path, [cfg.T],
                              diagnostics=False)
            errs.append(weighted_l1_distance(traj.final.values, uref, phi,
                                             grid.dx))
        return np.array(errs)

    names = [f"l1_error_eps={e:g}" for e in eps_list]
    summaries = _monte_carlo_multi(one, cfg.n_paths, cfg.base_seed, names,
                                   threads=threads)
    rows = [estimate_row(s) for s in summaries]
    means = [s.mean for s in summaries]
    figures: list[dict] = []
    meta_extra = {"dt_coarse": dt_coarse, "dt_fine": dt_fine,
                  "coarsen_factor": k, "reference_cells": ref_cells,
                  "reference_epsilon": eps_ref}

    top = max(means)
    degenerate = top <= 1e-14 or (top - min(means)) <= 1e-12 * top
    if degenerate:
        rows.append(verdict_row(
            "rate_slope", False, value="degenerate sweep",
            detail="errors do not vary with epsilon; slope fit rejected"))
    else:
        fit = fit_rate(list(zip(eps_list, means)), name="rate_fit")
        rows.append(fit_row(fit))
        decreasing = all(means[i + 1] < means[i]
                         for i in range(len(means) - 1))
        lo, hi = exp["slope_window"]
        slope_ok = fit.slope >= lo and (hi is None or fit.slope <= hi)
        rows.append(verdict_row(
            "rate_monotone", decreasing,
            detail="errors strictly decrease as epsilon shrinks"))
        rows.append(verdict_row(
            "rate_slope", slope_ok, value=fit.slope,
            detail=f"log-log slope within [{lo!r}, {hi!r}]"))
        figures.append({
            "name": "rate_error_vs_eps",
            "points": [[e, s.mean, s.half_width_95]
                       for e, s in zip(eps_list, summaries)],
            "fit": [fit.slope, fit.intercept],
            "xlabel": "epsilon", "ylabel": "E||u_eps(T) - u_ref(T)||_1",
            "title": "vanishing viscosity rate"})

    if snapshots_dir is not None:
        _maybe_snapshots(snapshots_dir, spec, grid, eps_list[0], dt_coarse,
                         n_coarse, [0.0, cfg.T / 2.0, cfg.T], cfg.base_seed)
    report = Report(experiment="rate", config=cfg.raw, rows=rows,
                    meta=_meta(started, cfg, threads, meta_extra))
    return report, figures


# ---------------------------------------------------------------------------
# continuous dependence


def _perturb(spec: ProblemSpec, channel: str, h: float) -> ProblemSpec:
    if h == 0.0:
        return spec
    if channel == "flux":
        base = spec.f
        return replace(spec, f=Coefficient(
            lambda u, _b=base: _b.fn(u) + h * np.asarray(u, dtype=float),
            lipschitz=base.lipschitz + h,
            second_derivative_bound=base.second_derivative_bound,
            name=f"{base.name}+h*id"))
    if channel == "diffusion":
        base = spec.A
        return replace(spec, A=Coefficient(
            lambda u, _b=base: _b.fn(u) + h * np.asarray(u, dtype=float),
            lipschitz=base.lipschitz + h,
            second_derivative_bound=base.second_derivative_bound,
            name=f"{base.name}+h*id"))
    if channel == "sigma":
        base = spec.sigma
        return replace(spec, sigma=BrownianCoefficient(
            lambda x, u, _b=base: (1.0 + h) * np.asarray(_b.fn(x, u),
                                                         dtype=float),
            lipschitz=(1.0 + h) * base.lipschitz,
            x_dependent=base.x_dependent, name=f"(1+h)*{base.name}"))
    base = spec.eta
    env = base.envelope
    return replace(spec, eta=JumpCoefficient(
        lambda x, u, z, _b=base: (1.0 + h) * np.asarray(_b.fn(x, u, z),
                                                        dtype=float),
        lambda_star=(1.0 + h) * base.lambda_star,
        linear_bound=(1.0 + h) * base.linear_bound,
        x_dependent=base.x_dependent,
        x_lipschitz=(1.0 + h) * base.x_lipschitz,
        envelope=None if env is None
        else (lambda x, _e=env: (1.0 + h) * np.asarray(_e(x), dtype=float)),
        name=f"(1+h)*{base.name}"))


def _channel_functional(spec: ProblemSpec, pert: ProblemSpec, channel: str,
                        u_bound: float) -> tuple[str, float]:
    if channel in ("flux", "diffusion"):
        a = spec.f if channel == "flux" else spec.A
        b = pert.f if channel == "flux" else pert.A
        grid = np.linspace(-u_bound, u_bound, 201)
        gap = float(np.max(np.abs(np.asarray(a.derivative(grid))
                                  - np.asarray(b.derivative(grid)))))
        label = "sup|f'-g'|" if channel == "flux" else "sup|A'-B'|"
        return label, gap
    if channel == "sigma":
        return "E(sigma,sigma~)", functional_E(spec.sigma, pert.sigma)
    return "D(eta,eta~)", functional_D(spec.eta, pert.eta, spec.m)


def run_continuous_dependence(cfg: RunConfig, threads: int = 1,
                              snapshots_dir=None) -> tuple[Report, list[dict]]:
    started = time.perf_counter()
    exp = cfg.experiment
    channel = exp["channel"]
    hs = exp["h_values"]
    nonzero = [h for h in hs if h > 0]
    if len(nonzero) < 3:
        raise InvalidArgumentError(
            "the perturbation sweep needs at least 3 nonzero sizes for a fit")
    eps = exp["epsilon"]

    spec, u_bound = build_problem(cfg)
    _refuse_invalid(spec, u_bound, "cdep base problem")
    grid = Grid.for_spec(spec)
    perts = [_perturb(spec, channel, h) for h in hs]
    for h, pert in zip(hs, perts):
        if h > 0:
            _refuse_invalid(pert, u_bound, f"cdep h={h:g} problem")

    phi = resolve_weight(exp["weight"], grid)
    dt_max = min([stable_dt(spec, grid, eps, cfg.safety)]
                 + [stable_dt(p, grid, eps, cfg.safety) for p in perts])
    dt, n = _steps_for(cfg.T, dt_max)

    def one(i: int) -> np.ndarray:
        path = make_noise_path(spec.m, cfg.base_seed, i, dt, n)
        out = []
        for pert in perts:
            trajA, trajB = solve_coupled(spec, pert, grid, eps, eps, path,
                                         [cfg.T])
            out.append(weighted_l1_distance(
                trajA.final.values, trajB.final.values, phi, grid.dx))
        return np.array(out)

    names = [f"distance_h={h:g}" for h in hs]
    summaries = _monte_carlo_multi(one, cfg.n_paths, cfg.base_seed, names,
                                   threads=threads)
    rows = [value_row("channel", None, detail=channel)]
    for h, pert, s in zip(hs, perts, summaries):
        label, fval = _channel_functional(spec, pert, channel, u_bound)
        rows.append(value_row(f"functional_h={h:g}", fval, detail=label))
        rows.append(estimate_row(s))

    by_h = {h: s for h, s in zip(hs, summaries)}
    if 0.0 in by_h:
        zero_mean = by_h[0.0].mean
        zero_var = by_h[0.0].variance
        rows.append(verdict_row(
            "cdep_zero_distance", zero_mean == 0.0 and zero_var == 0.0,
            value=zero_mean,
            detail="h=0 coupled runs must coincide bit-exactly"))

    fit_pts = [(h, by_h[h].mean) for h in nonzero]
    fit = fit_rate(fit_pts, name="cdep_fit")
    rows.append(fit_row(fit))
    lo, hi = exp["slope_window"]
    slope_ok = fit.slope >= lo and (hi is None or fit.slope <= hi)
    rows.append(verdict_row(
        "cdep_slope", slope_ok, value=fit.slope,
        detail=f"{channel} channel slope within [{lo!r}, {hi!r}]"))

    figures = [{
        "name": f"cdep_{channel}_distance_vs_h",
        "points": [[h, by_h[h].mean, by_h[h].half_width_95]
                   for h in nonzero],
        "fit": [fit.slope, fit.intercept],
        "xlabel": "perturbation size h",
        "ylabel": "E integral |u - v| Phi dx",
        "title": f"continuous dependence: {channel}"}]

    if snapshots_dir is not None:
        _maybe_snapshots(snapshots_dir, spec, grid, eps, dt, n,
                         [0.0, cfg.T / 2.0, cfg.T], cfg.base_seed)
    report = Report(experiment="cdep", config=cfg.raw, rows=rows,
                    meta=_meta(started, cfg, threads,
                               {"dt": dt, "n_steps": n, "channel": channel}))
    return report, figures


# ---------------------------------------------------------------------------
# fractional BV


def run_fractional_bv(cfg: RunConfig, threads: int = 1, snapshots_dir=None
                      ) -> tuple[Report, list[dict]]:
    started = time.perf_counter()
    exp = cfg.experiment
    deltas = sorted(exp["deltas"])
    if len(deltas) < 4:
        raise InvalidArgumentError(
            f"the delta sweep needs at least 4 values, got {len(deltas)}")
    eps = exp["epsilon"]

    spec, u_bound = build_problem(cfg)
    _refuse_invalid(spec, u_bound, "fracbv problem")
    grid = Grid.for_spec(spec)
    L = grid.domain_length
    x_lo = float(exp["window"]["x_lo"])
    x_hi = float(exp["window"]["x_hi"])
    if not (0.0 < x_lo < x_hi < L):
        raise InvalidArgumentError(
            f"window [{x_lo}, {x_hi}] must sit strictly inside (0, {L})")
    centers = grid.centers()
    start = int(np.searchsorted(centers, x_lo, side="left"))
    stop = int(np.searchsorted(centers, x_hi, side="right"))
    if stop - start < 2:
        raise InvalidArgumentError("window covers fewer than two cells")
    if min(deltas) < grid.dx:
        raise InvalidArgumentError(
            f"smallest delta {min(deltas)} is below the grid resolution "
            f"{grid.dx}")

    dt, n = _steps_for(cfg.T, stable_dt(spec, grid, eps, cfg.safety))

    def one(i: int) -> np.ndarray:
        path = make_noise_path(spec.m, cfg.base_seed, i, dt, n)
        traj = solve_path(spec, grid, eps, path, [cfg.T], diagnostics=False)
        u = traj.final.values
        return np.array([shift_modulus(u, d, grid.dx, window=(start, stop))
                         for d in deltas])

    names = [f"modulus_delta={d:g}" for d in deltas]
    summaries = _monte_carlo_multi(one, cfg.n_paths, cfg.base_seed, names,
                                   threads=threads)
    rows = [value_row("shift_resolution_dx", grid.dx,
                      detail="grid-aligned shifts; the modulus is a lower "
                             "bound with O(dx) bias")]
    rows += [estimate_row(s) for s in summaries]
    means = [s.mean for s in summaries]

    fit = fit_rate(list(zip(deltas, means)), name="fracbv_fit")
    rows.append(fit_row(fit))
    monotone = all(means[i + 1] >= means[i] - 1e-12
                   for i in range(len(means) - 1))
    rows.append(verdict_row(
        "fracbv_monotone", monotone,
        detail="E[modulus] nondecreasing in delta"))
    rows.append(verdict_row(
        "fracbv_slope", fit.slope >= exp["slope_min"], value=fit.slope,
        detail=f"fitted delta-exponent >= {exp['slope_min']!r}"))

    figures = [{
        "name": "fracbv_modulus_vs_delta",
        "points": [[d, s.mean, s.half_width_95]
                   for d, s in zip(deltas, summaries)],
        "fit": [fit.slope, fit.intercept],
        "xlabel": "delta", "ylabel": "E[shift modulus]",
        "title": "fractional BV modulus"}]

    if snapshots_dir is not None:
        _maybe_snapshots(snapshots_dir, spec, grid, eps, dt, n,
                         [0.0, cfg.T / 2.0, cfg.T], cfg.base_seed)
    report = Report(experiment="fracbv", config=cfg.raw, rows=rows,
                    meta=_meta(started, cfg, threads,
                               {"dt": dt, "n_steps": n,
                                "window_cells": [start, stop]}))
    return report, figures
