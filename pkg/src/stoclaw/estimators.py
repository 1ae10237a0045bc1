"""Grid-function functionals and their Monte Carlo aggregation.

Total variation, weighted L1 distances, shift and mollified moduli of
continuity, log-log rate fits, and the expectation-form entropy-inequality
residual.  monte_carlo runs a per-path estimator over deterministic
(base_seed, path_index) streams and reduces in fixed path order, so results
are bit-identical regardless of worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (BlowUpError, EstimationImpossibleError,
                     InvalidArgumentError)
from .model import Coefficient, EntropyTriple, ProblemSpec, kirchhoff
from .solver import Grid, Trajectory

# Midpoint nodes for the lambda integral in the jump entropy term.
_LAMBDA_NODES = (np.arange(16) + 0.5) / 16.0
_LAMBDA_WEIGHT = 1.0 / 16.0


@dataclass(frozen=True)
class EstimateSummary:
    """Monte Carlo mean with sampling uncertainty and failure accounting."""

    mean: float
    variance: float
    half_width_95: float
    n_paths: int
    n_failed: int
    base_seed: int
    name: str = ""

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "mean": self.mean,
            "var": self.variance,
            "half_width_95": self.half_width_95,
            "n_paths": self.n_paths,
            "n_failed": self.n_failed,
            "seed": self.base_seed,
        }


@dataclass(frozen=True)
class RateFit:
    """Least-squares slope of log(value) against log(abscissa)."""

    slope: float
    intercept: float
    r_squared: float
    points: tuple[tuple[float, float], ...]
    name: str = ""

    @property
    def n_points(self) -> int:
        return len(self.points)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "slope": self.slope,
            "intercept": self.intercept,
            "r2": self.r_squared,
            "n_points": self.n_points,
            "points": [[a, v] for a, v in self.points],
        }


def total_variation(values) -> float:
    """Periodic discrete total variation sum_j |u_{j+1} - u_j|."""
    u = np.asarray(values, dtype=float)
    return float(np.sum(np.abs(np.roll(u, -1) - u)))


def weighted_l1_distance(u, v, phi, dx: float) -> float:
    """sum_j |u_j - v_j| phi_j dx for a cell weight phi in [0, 1]."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if u.shape != v.shape or u.shape != phi.shape:
        raise InvalidArgumentError(
            f"shape mismatch: u {u.shape}, v {v.shape}, phi {phi.shape}")
    return float(np.sum(np.abs(u - v) * phi) * dx)


def shift_modulus(values, delta: float, dx: float,
                  window: tuple[int, int] | None = None) -> float:
    """max over grid shifts |k|*dx <= delta of the windowed L1 shift distance.

    Grid-aligned shifts only: the estimator is a lower bound of the
    continuum modulus with O(dx) bias.  The window is a half-open index
    range (start, stop); values wrap periodically when a shifted index exits
    the window.
    """
    u = np.asarray(values, dtype=float)
    n = len(u)
    if delta < dx:
        raise InvalidArgumentError(
            f"delta = {delta} below grid resolution dx = {dx}")
    k_max = int(math.floor(delta / dx + 1e-9))
    if window is None:
        window = (0, n)
    start, stop = window
    if not (0 <= start < stop <= n):
        raise InvalidArgumentError(f"window {window} out of range for {n} cells")
    idx = np.arange(start, stop)
    best = 0.0
    for k in range(1, k_max + 1):
        for sign in (k, -k):
            shifted = u[(idx + sign) % n]
            best = max(best, float(np.sum(np.abs(shifted - u[idx])) * dx))
    return best


def mollified_modulus(values, delta: float, kernel: Callable, zeta, dx: float
                      ) -> float:
    """Double sum of |h(x+z) - h(x-z)| J_delta(z) zeta(x) dx dz.

    `kernel` is an even profile J supported in [-1, 1]; it is discretized at
    grid offsets z = k*dx, |k*dx| <= delta, as J_delta(z) = J(z/delta)/delta.
    The discrete mass must land within 1e-6 of 1 (choose delta commensurate
    with dx, e.g. integer multiples for the triangular profile); the last
    epsilon is then normalized away.
    """
    u = np.asarray(values, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    if u.shape != zeta.shape:
        raise InvalidArgumentError("values and zeta must share the grid")
    n = len(u)
    if delta < dx:
        raise InvalidArgumentError(
            f"delta = {delta} below grid resolution dx = {dx}")
    k_max = int(math.floor(delta / dx + 1e-9))
    offsets = np.arange(-k_max, k_max + 1)
    weights = np.array([kernel(k * dx / delta) for k in offsets], dtype=float) \
        / delta * dx
    mass = float(np.sum(weights))
    if abs(mass - 1.0) > 1e-6:
        raise InvalidArgumentError(
            f"discretized kernel mass {mass} deviates from 1 beyond 1e-6")
    weights = weights / mass
    idx = np.arange(n)
    total = 0.0
    for k, w in zip(offsets, weights):
        if w == 0.0 or k <= 0:
            # |h(x+z)-h(x-z)| is even in z; fold negative offsets into k>0
            continue
        diff = np.abs(u[(idx + k) % n] - u[(idx - k) % n])
        total += 2.0 * w * float(np.sum(diff * zeta) * dx)
    # k = 0 contributes nothing (h(x) - h(x) = 0)
    return total


def triangular_kernel(s: float) -> float:
    """Even mollifier profile (1 - |s|)_+ with unit continuum mass."""
    return max(0.0, 1.0 - abs(s))


def monte_carlo(per_path_estimator: Callable[[int], float], n_paths: int,
                base_seed: int, threads: int = 1, name: str = "") -> EstimateSummary:
    """Mean/variance/95% CI of a per-path scalar over deterministic streams.

    The estimator receives the path index and derives its own randomness
    from (base_seed, path_index).  Paths raising BlowUpError count as failed
    and are excluded; everything failing means no estimate exists.
    """
    summaries = _monte_carlo_multi(
        lambda i: np.array([per_path_estimator(i)], dtype=float),
        n_paths, base_seed, [name], threads=threads)
    return summaries[0]


def _monte_carlo_multi(per_path: Callable[[int], np.ndarray], n_paths: int,
                       base_seed: int, names: Sequence[str],
                       threads: int = 1) -> list[EstimateSummary]:
    """Vector-valued variant: one solve per path, several named estimands."""
    if n_paths < 2:
        raise InvalidArgumentError(f"need n_paths >= 2, got {n_paths}")

    def run_one(i: int):
        try:
            return np.asarray(per_path(i), dtype=float)
        except BlowUpError:
            return None

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_one, range(n_paths)))
    else:
        results = [run_one(i) for i in range(n_paths)]

    rows = [r for r in results if r is not None]
    n_failed = n_paths - len(rows)
    if not rows:
        raise EstimationImpossibleError(
            f"all {n_paths} paths failed (seed {base_seed})")
    data = np.stack(rows, axis=0)
    if data.shape[1] != len(names):
        raise InvalidArgumentError(
            f"per-path vector has {data.shape[1]} entries, {len(names)} names")
    out = []
    for j, name in enumerate(names):
        col = data[:, j]
        n = len(col)
        mean = float(np.sum(col) / n)
        variance = float(np.sum((col - mean) ** 2) / (n - 1)) if n >= 2 else 0.0
        half = 1.96 * math.sqrt(variance / n)
        out.append(EstimateSummary(mean=mean, variance=variance,
                                   half_width_95=half, n_paths=n,
                                   n_failed=n_failed, base_seed=base_seed,
                                   name=name))
    return out


def fit_rate(points: Iterable[tuple[float, float]], name: str = "") -> RateFit:
    """OLS of log(value) on log(abscissa); needs >= 3 positive points."""
    pts = tuple((float(a), float(v)) for a, v in points)
    if len(pts) < 3:
        raise InvalidArgumentError(f"need at least 3 points, got {len(pts)}")
    if any(a <= 0 or v <= 0 for a, v in pts):
        raise InvalidArgumentError("rate fits need positive abscissae and values")
    logx = np.log([a for a, _ in pts])
    logy = np.log([v for _, v in pts])
    slope, intercept = np.polyfit(logx, logy, 1)
    fitted = slope * logx + intercept
    ss_res = float(np.sum((logy - fitted) ** 2))
    ss_tot = float(np.sum((logy - np.mean(logy)) ** 2))
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res <= 1e-24 else 0.0
    else:
        r2 = max(0.0, 1.0 - ss_res / ss_tot)
    return RateFit(slope=float(slope), intercept=float(intercept),
                   r_squared=float(r2), points=pts, name=name)


# ---------------------------------------------------------------------------
# entropy residual


@dataclass(frozen=True)
class TestFunction:
    """Space-time weight psi >= 0 with analytic derivatives.

    Compactly supported strictly inside the spatial domain and vanishing at
    the final time, as the entropy inequality requires.
    """

    __test__ = False  # a PDE test function, not a test-framework fixture

    value: Callable
    dt: Callable
    dx: Callable
    dxx: Callable
    x_support: tuple[float, float]
    t_end: float


def make_bump_test_function(x_center: float, x_halfwidth: float, t_end: float,
                            domain_length: float) -> TestFunction:
    """Separable cos^2 bump in x times a cos^2 taper vanishing at t_end."""
    lo, hi = x_center - x_halfwidth, x_center + x_halfwidth
    if not (0.0 < lo and hi < domain_length):
        raise InvalidArgumentError(
            f"test function support [{lo}, {hi}] touches the domain boundary")
    wx = math.pi / (2.0 * x_halfwidth)
    wt = math.pi / (2.0 * t_end)

    def xenv(x):
        x = np.asarray(x, dtype=float)
        inside = np.abs(x - x_center) < x_halfwidth
        c = np.cos(wx * (x - x_center))
        return np.where(inside, c * c, 0.0)

    def xenv_d(x):
        x = np.asarray(x, dtype=float)
        inside = np.abs(x - x_center) < x_halfwidth
        arg = wx * (x - x_center)
        return np.where(inside, -2.0 * wx * np.cos(arg) * np.sin(arg), 0.0)

    def xenv_dd(x):
        x = np.asarray(x, dtype=float)
        inside = np.abs(x - x_center) < x_halfwidth
        arg = wx * (x - x_center)
        return np.where(inside, -2.0 * wx * wx * np.cos(2.0 * arg), 0.0)

    def tenv(t):
        if t >= t_end:
            return 0.0
        c = math.cos(wt * t)
        return c * c

    def tenv_d(t):
        if t >= t_end:
            return 0.0
        return -2.0 * wt * math.cos(wt * t) * math.sin(wt * t)

    return TestFunction(
        value=lambda t, x: tenv(t) * xenv(x),
        dt=lambda t, x: tenv_d(t) * xenv(x),
        dx=lambda t, x: tenv(t) * xenv_d(x),
        dxx=lambda t, x: tenv(t) * xenv_dd(x),
        x_support=(lo, hi),
        t_end=t_end)


class ResidualEvaluator:
    """Discrete expectation-form entropy residual for one (triple, psi) pair.

    Evaluates, per trajectory, the space-time quadrature of
    beta(u) psi_t + nu(u) psi_xx - zeta(u) psi_x + (1/2) sigma^2 beta'' psi
    + jump term - beta''(u) |grad G(u)|^2 psi, plus the initial mass
    beta(u0) psi(0).  The Kirchhoff gradient uses central differences; the
    lambda integral in the jump term uses a 16-point midpoint rule.
    A nonnegative Monte Carlo mean certifies the inequality for this pair
    within sampling and discretization error.
    """

    def __init__(self, triple: EntropyTriple, spec: ProblemSpec, grid: Grid,
                 test_fn: TestFunction):
        lo, hi = test_fn.x_support
        if not (0.0 < lo and hi < grid.domain_length):
            raise InvalidArgumentError(
                "test function support touches the domain boundary")
        self.triple = triple
        self.spec = spec
        self.grid = grid
        self.test_fn = test_fn
        # Tabulate the Kirchhoff transform of A once over the triple's range.
        nodes = np.linspace(triple.u_lo, triple.u_hi, 257)
        self._g_nodes = nodes
        self._g_vals = np.array([kirchhoff(spec.A, float(v)) for v in nodes])

    def _G(self, u):
        return np.interp(u, self._g_nodes, self._g_vals)

    def __call__(self, trajectory: Trajectory) -> float:
        grid = self.grid
        spec = self.spec
        triple = self.triple
        psi = self.test_fn
        x = grid.centers()
        dx = grid.dx
        snaps = trajectory.snapshots
        times = np.array([s.t for s in snaps])
        if len(snaps) < 2:
            raise InvalidArgumentError("residual needs at least two snapshots")
        if psi.t_end > times[-1] + 1e-9:
            raise InvalidArgumentError(
                "test function does not vanish by the final snapshot")
        # trapezoid weights over the snapshot times
        w = np.empty_like(times)
        w[0] = 0.5 * (times[1] - times[0])
        w[-1] = 0.5 * (times[-1] - times[-2])
        w[1:-1] = 0.5 * (times[2:] - times[:-2])

        total = 0.0
        for snap, wt in zip(snaps, w):
            u = snap.values
            t = snap.t
            psi_v = np.asarray(psi.value(t, x), dtype=float)
            if not np.any(psi_v):
                continue
            psi_t = np.asarray(psi.dt(t, x), dtype=float)
            psi_x = np.asarray(psi.dx(t, x), dtype=float)
            psi_xx = np.asarray(psi.dxx(t, x), dtype=float)
            beta = triple.beta(u)
            beta_dd = triple.beta_double_prime(u)
            sig = np.asarray(spec.sigma(x, u), dtype=float)
            cell = (beta * psi_t + triple.nu(u) * psi_xx
                    - triple.zeta(u) * psi_x + 0.5 * sig * sig * beta_dd * psi_v)
            for z, wz in spec.m.atoms:
                eta = np.asarray(spec.eta(x, u, z), dtype=float)
                lam_sum = np.zeros_like(u)
                for lam in _LAMBDA_NODES:
                    lam_sum += (1.0 - lam) * triple.beta_double_prime(
                        u + lam * eta)
                cell += wz * eta * eta * lam_sum * _LAMBDA_WEIGHT * psi_v
            g = self._G(u)
            gx = (np.roll(g, -1) - np.roll(g, 1)) / (2.0 * dx)
            cell -= beta_dd * gx * gx * psi_v
            total += wt * float(np.sum(cell) * dx)

        u0 = snaps[0].values
        total += float(np.sum(triple.beta(u0)
                              * np.asarray(psi.value(0.0, x), dtype=float)) * dx)
        return total


def entropy_residual_expectation(trajectories: Iterable[Trajectory],
                                 triple: EntropyTriple, spec: ProblemSpec,
                                 grid: Grid, test_fn: TestFunction) -> float:
    """Average the per-trajectory residual over a Monte Carlo set."""
    evaluator = ResidualEvaluator(triple, spec, grid, test_fn)
    values = [evaluator(traj) for traj in trajectories]
    if not values:
        raise InvalidArgumentError("no trajectories supplied")
    return float(sum(values) / len(values))
