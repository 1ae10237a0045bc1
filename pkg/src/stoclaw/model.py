"""Problem data and the entropy toolkit.

Holds the coefficient wrappers (flux, diffusion, Brownian and jump noise
amplitudes with their declared constants), the convex approximation family
beta_xi of the absolute value with certified constants M1 and M2, entropy
flux integrals, the Kirchhoff transform, the continuous-dependence
functionals E and D, and the assumption validators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidArgumentError, MonotonicityError
from .noise import LevyMeasure, levy_integrability

# Quadrature default: composite midpoint, this many panels per unit length.
PANELS_PER_UNIT = 1024

# Central-difference step scale for evaluation-only coefficient handles.
DIFF_H_SCALE = 1e-5


# ---------------------------------------------------------------------------
# coefficient wrappers


@dataclass(frozen=True)
class Coefficient:
    """Scalar coefficient u -> value with a declared Lipschitz constant.

    `fn` must accept numpy arrays (all built-in coefficients do).  The
    declared constants are what the solver and validators trust; the
    validator cross-checks them against sampled difference quotients.
    """

    fn: Callable
    lipschitz: float
    second_derivative_bound: float | None = None
    name: str = ""

    def __post_init__(self):
        if self.lipschitz < 0:
            raise InvalidArgumentError("declared Lipschitz constant must be >= 0")

    def __call__(self, u):
        return self.fn(u)

    def derivative(self, u):
        """Central difference with step h = DIFF_H_SCALE * max(1, |u|)."""
        u = np.asarray(u, dtype=float)
        h = DIFF_H_SCALE * np.maximum(1.0, np.abs(u))
        return (self.fn(u + h) - self.fn(u - h)) / (2.0 * h)


@dataclass(frozen=True)
class BrownianCoefficient:
    """Brownian amplitude sigma(x, u); set x_dependent=False for sigma(u)."""

    fn: Callable
    lipschitz: float
    x_dependent: bool = False
    name: str = ""

    def __post_init__(self):
        if self.lipschitz < 0:
            raise InvalidArgumentError("declared Lipschitz constant must be >= 0")

    def __call__(self, x, u):
        return self.fn(x, u)

    @classmethod
    def from_u(cls, fn_u: Callable, lipschitz: float, name: str = ""):
        return cls(fn=lambda x, u: fn_u(u), lipschitz=lipschitz,
                   x_dependent=False, name=name)


@dataclass(frozen=True)
class JumpCoefficient:
    """Jump amplitude eta(x, u; z) with declared constants.

    lambda_star is the Lipschitz factor in u (must sit in (0,1) for the
    contraction assumption; the validator checks the range), linear_bound is
    C in |eta| <= C|u|(|z| ^ 1), x_lipschitz is the K2 of the x-dependent
    regime, envelope is the optional g(x) of the envelope bound
    |eta(x,u;z)| <= g(x)(1+|u|)(|z| ^ 1).
    """

    fn: Callable
    lambda_star: float
    linear_bound: float
    x_dependent: bool = False
    x_lipschitz: float = 0.0
    envelope: Callable | None = None
    name: str = ""

    def __call__(self, x, u, z):
        return self.fn(x, u, z)

    @classmethod
    def from_u(cls, fn_uz: Callable, lambda_star: float, linear_bound: float,
               name: str = ""):
        return cls(fn=lambda x, u, z: fn_uz(u, z), lambda_star=lambda_star,
                   linear_bound=linear_bound, x_dependent=False, name=name)


def zero_flux() -> Coefficient:
    return Coefficient(fn=lambda u: np.zeros_like(np.asarray(u, dtype=float)),
                       lipschitz=0.0, second_derivative_bound=0.0, name="zero")


def zero_brownian() -> BrownianCoefficient:
    return BrownianCoefficient.from_u(
        lambda u: np.zeros_like(np.asarray(u, dtype=float)), 0.0, name="zero")


def zero_jump() -> JumpCoefficient:
    # lambda_star is nominal here: a vanishing eta never jumps.
    return JumpCoefficient.from_u(
        lambda u, z: np.zeros_like(np.asarray(u, dtype=float)),
        lambda_star=0.5, linear_bound=0.0, name="zero")


# ---------------------------------------------------------------------------
# beta family

_M1 = 1.0 / 3.0
_M2 = 2.0


@dataclass(frozen=True)
class BetaFamily:
    """Scaled convex approximation beta_xi(r) = xi * beta(r/xi) of |r|.

    Base profile: beta''(r) = 2(1-|r|)_+, so that on [0,1]
    beta'(r) = r(2-r) and beta(r) = r^2 - r^3/3, with beta(r) = |r| - 1/3
    beyond.  Closed forms keep every certified constant exactly testable:
    M1 = 1/3 (so |r| - M1*xi <= beta_xi(r) <= |r|) and M2 = 2
    (so |beta_xi''| <= M2/xi, vanishing for |r| > xi).
    """

    xi: float
    M1: float = _M1
    M2: float = _M2

    def beta(self, r):
        r = np.asarray(r, dtype=float)
        a = np.abs(r)
        s = np.minimum(a / self.xi, 1.0)
        inner = self.xi * s * s * (1.0 - s / 3.0)
        out = np.where(a <= self.xi, inner, a - self.xi / 3.0)
        return out if out.ndim else float(out)

    def beta_prime(self, r):
        r = np.asarray(r, dtype=float)
        s = np.clip(r / self.xi, -1.0, 1.0)
        inner = s * (2.0 - np.abs(s))
        out = np.where(np.abs(r) <= self.xi, inner, np.sign(r))
        return out if out.ndim else float(out)

    def beta_double_prime(self, r):
        r = np.asarray(r, dtype=float)
        out = (2.0 / self.xi) * np.maximum(1.0 - np.abs(r) / self.xi, 0.0)
        return out if out.ndim else float(out)


def make_beta_family(xi: float) -> BetaFamily:
    if not (xi > 0.0) or not math.isfinite(xi):
        raise InvalidArgumentError(f"xi must be a positive real, got {xi}")
    return BetaFamily(xi=float(xi))


# ---------------------------------------------------------------------------
# quadrature operations


def _midpoints(lo: float, hi: float, n: int) -> tuple[np.ndarray, float]:
    w = (hi - lo) / n
    return lo + (np.arange(n) + 0.5) * w, w


def kirchhoff(A: Coefficient, u: float, panels_per_unit: int = PANELS_PER_UNIT) -> float:
    """Kirchhoff transform G(u) = integral_0^u sqrt(A'(r)) dr.

    A' comes from central differences; a sample A' < -tolerance raises a
    monotonicity violation, tiny negative samples are clipped to 0.
    """
    u = float(u)
    if u == 0.0:
        return 0.0
    n = max(16, int(math.ceil(abs(u) * panels_per_unit)))
    mids, w = _midpoints(0.0, u, n)
    slopes = np.asarray(A.derivative(mids), dtype=float)
    tol = 1e-8 * max(1.0, A.lipschitz)
    bad = slopes < -tol
    if np.any(bad):
        i = int(np.argmax(bad))
        raise MonotonicityError(
            f"A'({mids[i]:.6g}) = {slopes[i]:.3g} < 0: diffusion not nondecreasing"
        )
    return float(np.sum(np.sqrt(np.maximum(slopes, 0.0))) * w)


def entropy_flux(coeff: Coefficient, family: BetaFamily, a: float, b: float,
                 panels_per_unit: int = PANELS_PER_UNIT) -> float:
    """Doubled entropy flux integral_b^a beta_xi'(r-b) coeff'(r) dr.

    Signed integral; a < b is allowed and follows the formula exactly.
    """
    a = float(a)
    b = float(b)
    if a == b:
        return 0.0
    n = max(16, int(math.ceil(abs(a - b) * panels_per_unit)))
    mids, w = _midpoints(b, a, n)
    vals = family.beta_prime(mids - b) * np.asarray(coeff.derivative(mids), dtype=float)
    return float(np.sum(vals) * w)


def entropy_flux_partial_b(coeff: Coefficient, family: BetaFamily, a: float,
                           b: float, panels: int = 4096) -> float:
    """d/db of the doubled entropy flux, by its expansion.

    Differentiating under the integral gives
    d/db f^beta(a, b) = -integral_b^a beta_xi''(r-b) coeff'(r) dr;
    the integrand vanishes for |r-b| > xi, so quadrature runs only over the
    kernel support, aligned to it.
    """
    a = float(a)
    b = float(b)
    if a == b:
        return 0.0
    sign = 1.0 if a > b else -1.0
    reach = min(abs(a - b), family.xi)
    end = b + sign * reach
    mids, w = _midpoints(b, end, panels)
    vals = family.beta_double_prime(mids - b) * np.asarray(
        coeff.derivative(mids), dtype=float)
    return -float(np.sum(vals) * w)


def entropy_flux_difference_partial_upper(
    f: Coefficient, g: Coefficient, family: BetaFamily, b: float, a: float
) -> float:
    """d/db of [f^beta(b, a) - g^beta(b, a)]: exact upper-limit derivative.

    Both integrals share the upper limit b, so the derivative collapses to
    beta_xi'(b-a) * (f'(b) - g'(b)) with no quadrature at all.
    """
    diff = float(np.asarray(f.derivative(b)) - np.asarray(g.derivative(b)))
    return float(family.beta_prime(b - a)) * diff


# ---------------------------------------------------------------------------
# entropy triple


@dataclass(frozen=True)
class EntropyTriple:
    """Convex entropy beta_xi(. - center) with companion fluxes.

    zeta' = beta'(.-center) f' and nu' = beta'(.-center) A', both anchored to
    vanish at the center.  zeta and nu are tabulated on a fine grid at
    construction and evaluated by linear interpolation, so the residual
    estimator can call them on whole snapshots.
    """

    beta_family: BetaFamily
    center: float
    zeta: Callable
    nu: Callable
    u_lo: float
    u_hi: float

    def beta(self, u):
        return self.beta_family.beta(np.asarray(u, dtype=float) - self.center)

    def beta_prime(self, u):
        return self.beta_family.beta_prime(np.asarray(u, dtype=float) - self.center)

    def beta_double_prime(self, u):
        return self.beta_family.beta_double_prime(
            np.asarray(u, dtype=float) - self.center)


def _tabulate_primitive(density: Callable, center: float, lo: float, hi: float,
                        panels_per_unit: int) -> tuple[np.ndarray, np.ndarray]:
    """Cumulative midpoint integral of `density`, anchored to 0 at `center`."""
    span = hi - lo
    n = max(64, int(math.ceil(span * panels_per_unit)))
    nodes = np.linspace(lo, hi, n + 1)
    mids = 0.5 * (nodes[:-1] + nodes[1:])
    h = span / n
    cumulative = np.concatenate([[0.0], np.cumsum(density(mids) * h)])
    anchored = cumulative - np.interp(center, nodes, cumulative)
    return nodes, anchored


def make_entropy_triple(f: Coefficient, A: Coefficient, family: BetaFamily,
                        center: float, u_lo: float, u_hi: float,
                        panels_per_unit: int = PANELS_PER_UNIT) -> EntropyTriple:
    """Build the (beta, zeta, nu) triple for Kruzkov constant `center`.

    The table covers [u_lo, u_hi]; evaluations outside clamp to the edge
    values, so choose a range generously containing the solution range.
    """
    if not (u_lo < u_hi):
        raise InvalidArgumentError("need u_lo < u_hi for the entropy flux table")
    lo = min(u_lo, center - 1.0)
    hi = max(u_hi, center + 1.0)

    def zeta_density(r):
        return family.beta_prime(r - center) * np.asarray(f.derivative(r), dtype=float)

    def nu_density(r):
        return family.beta_prime(r - center) * np.asarray(A.derivative(r), dtype=float)

    z_nodes, z_vals = _tabulate_primitive(zeta_density, center, lo, hi, panels_per_unit)
    n_nodes, n_vals = _tabulate_primitive(nu_density, center, lo, hi, panels_per_unit)

    def zeta(u):
        return np.interp(np.asarray(u, dtype=float), z_nodes, z_vals)

    def nu(u):
        return np.interp(np.asarray(u, dtype=float), n_nodes, n_vals)

    return EntropyTriple(beta_family=family, center=float(center), zeta=zeta,
                         nu=nu, u_lo=lo, u_hi=hi)


# ---------------------------------------------------------------------------
# continuous-dependence functionals


def default_ratio_grid() -> np.ndarray:
    """Log-spaced evaluation grid: 512 points per sign, |u| in [1e-4, 1e2]."""
    mags = np.logspace(-4.0, 2.0, 512)
    return np.concatenate([-mags[::-1], mags])


def functional_E(sigma: BrownianCoefficient, sigma_tilde: BrownianCoefficient,
                 grid: Sequence[float] | None = None) -> float:
    """sup over the grid of |sigma(u) - sigma_tilde(u)| / |u|.

    A grid lower bound of the true supremum; x-dependent coefficients have
    no such functional and are rejected.
    """
    if sigma.x_dependent or sigma_tilde.x_dependent:
        raise InvalidArgumentError("functional E is defined for x-independent sigma")
    g = default_ratio_grid() if grid is None else np.asarray(grid, dtype=float)
    if np.any(g == 0.0):
        raise InvalidArgumentError("evaluation grid must exclude 0")
    x0 = np.zeros_like(g)
    num = np.abs(np.asarray(sigma(x0, g)) - np.asarray(sigma_tilde(x0, g)))
    return float(np.max(num / np.abs(g)))


def functional_D(eta: JumpCoefficient, eta_tilde: JumpCoefficient,
                 m: LevyMeasure, grid: Sequence[float] | None = None) -> float:
    """sup over the grid of the atom sum of |eta - eta_tilde|^2 / u^2."""
    if eta.x_dependent or eta_tilde.x_dependent:
        raise InvalidArgumentError("functional D is defined for x-independent eta")
    g = default_ratio_grid() if grid is None else np.asarray(grid, dtype=float)
    if np.any(g == 0.0):
        raise InvalidArgumentError("evaluation grid must exclude 0")
    x0 = np.zeros_like(g)
    total = np.zeros_like(g)
    for z, w in m.atoms:
        diff = np.asarray(eta(x0, g, z)) - np.asarray(eta_tilde(x0, g, z))
        total = total + w * diff * diff
    return float(np.max(total / (g * g)))


# ---------------------------------------------------------------------------
# problem spec and validators


@dataclass(frozen=True)
class ProblemSpec:
    """The full data tuple of one balance law on a periodic 1-D domain."""

    f: Coefficient
    A: Coefficient
    sigma: BrownianCoefficient
    eta: JumpCoefficient
    m: LevyMeasure
    u0: np.ndarray
    domain_length: float
    cells: int

    def __post_init__(self):
        u0 = np.asarray(self.u0, dtype=float)
        object.__setattr__(self, "u0", u0)
        if self.cells <= 0 or self.domain_length <= 0:
            raise InvalidArgumentError("cells and domain_length must be positive")
        if len(u0) != self.cells:
            raise InvalidArgumentError(
                f"u0 has {len(u0)} cells, spec declares {self.cells}")
        if not np.all(np.isfinite(u0)):
            raise InvalidArgumentError("u0 must be finite")

    @property
    def x_dependent_noise(self) -> bool:
        return self.sigma.x_dependent or self.eta.x_dependent


@dataclass
class AssumptionCheck:
    name: str
    passed: bool
    detail: str
    witness: dict | None = None

    def as_dict(self) -> dict:
        out = {"name": self.name, "passed": self.passed, "detail": self.detail}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class ValidationReport:
    checks: list[AssumptionCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[AssumptionCheck]:
        return [c for c in self.checks if not c.passed]

    def as_dict(self) -> dict:
        return {"passed": self.passed, "checks": [c.as_dict() for c in self.checks]}


def _lipschitz_quotients(fn, grid: np.ndarray):
    vals = np.asarray(fn(grid), dtype=float)
    dq = np.abs(np.diff(vals)) / np.diff(grid)
    return vals, dq


def _check_lipschitz(name: str, fn, declared: float, grid: np.ndarray,
                     rel_tol: float = 1e-6) -> AssumptionCheck:
    _, dq = _lipschitz_quotients(fn, grid)
    worst = int(np.argmax(dq)) if len(dq) else 0
    bound = declared * (1.0 + rel_tol) + 1e-12
    ok = bool(len(dq) == 0 or dq[worst] <= bound)
    witness = None
    if not ok:
        witness = {"u": float(grid[worst]), "quotient": float(dq[worst]),
                   "declared": declared}
    return AssumptionCheck(
        name=name, passed=ok,
        detail=f"max difference quotient {float(dq[worst]) if len(dq) else 0.0:.6g} "
               f"vs declared {declared:.6g}",
        witness=witness)


def _check_zero_at_zero(name: str, value: float, tol: float = 1e-12) -> AssumptionCheck:
    ok = bool(abs(value) <= tol)
    return AssumptionCheck(
        name=name, passed=ok, detail=f"|value at 0| = {abs(value):.3g}",
        witness=None if ok else {"u": 0.0, "value": float(value)})


def validate_assumptions(spec: ProblemSpec, u_bound: float | None = None,
                         n_samples: int = 401) -> ValidationReport:
    """Machine-check the standing assumptions on a sampling grid.

    Checks zero-at-zero and grid Lipschitz constants for f, A, sigma,
    monotonicity of A, the contraction range of lambda_star, the linear jump
    bound, the x-dependent joint Lipschitz constants and envelope bound when
    applicable, and reports the Levy integrability value.  Failures are
    report entries, never exceptions.
    """
    report = ValidationReport()
    if u_bound is None:
        u_bound = max(1.0, 2.0 * float(np.max(np.abs(spec.u0))))
    grid = np.linspace(-u_bound, u_bound, n_samples)
    x_grid = np.linspace(0.0, spec.domain_length, 33)

    u0 = spec.u0
    dx = spec.domain_length / spec.cells
    tv0 = float(np.sum(np.abs(np.roll(u0, -1) - u0)))
    report.checks.append(AssumptionCheck(
        name="A1_initial_data",
        passed=bool(np.all(np.isfinite(u0))),
        detail=f"L1={float(np.sum(np.abs(u0)) * dx):.6g}, "
               f"L2={float(np.sqrt(np.sum(u0 * u0) * dx)):.6g}, TV={tv0:.6g}"))

    a_vals = np.asarray(spec.A(grid), dtype=float)
    drops = np.diff(a_vals) < -1e-10 * max(1.0, spec.A.lipschitz)
    mono_ok = not bool(np.any(drops))
    witness = None
    if not mono_ok:
        i = int(np.argmax(drops))
        witness = {"u": float(grid[i]), "A_left": float(a_vals[i]),
                   "A_right": float(a_vals[i + 1])}
    report.checks.append(AssumptionCheck(
        name="A2_diffusion_monotone", passed=mono_ok,
        detail="A nondecreasing on grid" if mono_ok else "A decreases on grid",
        witness=witness))
    report.checks.append(_check_zero_at_zero(
        "A2_diffusion_zero_at_zero", float(np.asarray(spec.A(np.array([0.0])))[0])))
    report.checks.append(_check_lipschitz(
        "A2_diffusion_lipschitz", spec.A, spec.A.lipschitz, grid))

    report.checks.append(_check_zero_at_zero(
        "A3_flux_zero_at_zero", float(np.asarray(spec.f(np.array([0.0])))[0])))
    report.checks.append(_check_lipschitz(
        "A3_flux_lipschitz", spec.f, spec.f.lipschitz, grid))

    sig_name = "B31" if spec.sigma.x_dependent else "A4"
    x_probe = x_grid if spec.sigma.x_dependent else np.zeros(1)
    sig0 = 0.0
    for xp in np.atleast_1d(x_probe):
        v = float(np.asarray(spec.sigma(np.array([xp]), np.zeros(1)))[0])
        sig0 = max(sig0, abs(v))
    report.checks.append(_check_zero_at_zero(f"{sig_name}_sigma_zero_at_zero", sig0))
    worst_q = 0.0
    for xp in np.atleast_1d(x_probe):
        _, dq = _lipschitz_quotients(lambda uu: spec.sigma(np.full_like(uu, xp), uu), grid)
        worst_q = max(worst_q, float(np.max(dq)) if len(dq) else 0.0)
    report.checks.append(AssumptionCheck(
        name=f"{sig_name}_sigma_lipschitz_u",
        passed=bool(worst_q <= spec.sigma.lipschitz * (1.0 + 1e-6) + 1e-12),
        detail=f"max u-quotient {worst_q:.6g} vs declared {spec.sigma.lipschitz:.6g}"))
    if spec.sigma.x_dependent:
        worst_x = 0.0
        for uu in np.linspace(-u_bound, u_bound, 17):
            _, dq = _lipschitz_quotients(
                lambda xx: spec.sigma(xx, np.full_like(xx, uu)), x_grid)
            worst_x = max(worst_x, float(np.max(dq)) if len(dq) else 0.0)
        report.checks.append(AssumptionCheck(
            name="B31_sigma_lipschitz_x",
            passed=bool(worst_x <= spec.sigma.lipschitz * (1.0 + 1e-6) + 1e-12),
            detail=f"max x-quotient {worst_x:.6g} vs declared {spec.sigma.lipschitz:.6g}"))

    eta_name = "B3" if spec.eta.x_dependent else "A5"
    lam = spec.eta.lambda_star
    lam_ok = bool(0.0 < lam < 1.0)
    report.checks.append(AssumptionCheck(
        name=f"{eta_name}_lambda_star_range", passed=lam_ok,
        detail=f"lambda_star = {lam:.6g}, required in (0, 1)",
        witness=None if lam_ok else {"lambda_star": lam}))

    x_probe_eta = x_grid if spec.eta.x_dependent else np.zeros(1)
    atoms = spec.m.atoms if spec.m.atoms else ()
    zero_worst = 0.0
    bound_ok = True
    bound_witness = None
    lip_worst = 0.0
    for z, _w in atoms:
        kappa = min(1.0, abs(z))
        for xp in np.atleast_1d(x_probe_eta):
            xs = np.full_like(grid, xp)
            vals = np.asarray(spec.eta(xs, grid, z), dtype=float)
            zero_worst = max(zero_worst, abs(float(
                np.asarray(spec.eta(np.array([xp]), np.zeros(1), z))[0])))
            cap = spec.eta.linear_bound * np.abs(grid) * kappa + 1e-12
            over = np.abs(vals) > cap * (1.0 + 1e-6)
            if not spec.eta.x_dependent and np.any(over):
                bound_ok = False
                i = int(np.argmax(over))
                bound_witness = {"u": float(grid[i]), "z": z,
                                 "value": float(vals[i]), "cap": float(cap[i])}
            dq = np.abs(np.diff(vals)) / np.diff(grid)
            if len(dq):
                lip_worst = max(lip_worst, float(np.max(dq)) / max(kappa, 1e-300))
    if atoms:
        report.checks.append(_check_zero_at_zero(
            f"{eta_name}_eta_zero_at_zero", zero_worst))
        if not spec.eta.x_dependent:
            report.checks.append(AssumptionCheck(
                name="A5_eta_linear_bound", passed=bound_ok,
                detail="|eta| <= C|u|(|z| ^ 1) on grid" if bound_ok
                       else "linear jump bound violated",
                witness=bound_witness))
        report.checks.append(AssumptionCheck(
            name=f"{eta_name}_eta_lipschitz_u",
            passed=bool(lip_worst <= lam * (1.0 + 1e-6) + 1e-12),
            detail=f"max u-quotient/(|z| ^ 1) = {lip_worst:.6g} vs lambda_star {lam:.6g}"))
        if spec.eta.x_dependent:
            worst_x = 0.0
            for z, _w in atoms:
                kappa = min(1.0, abs(z))
                for uu in np.linspace(-u_bound, u_bound, 9):
                    _, dq = _lipschitz_quotients(
                        lambda xx: spec.eta(xx, np.full_like(xx, uu), z), x_grid)
                    if len(dq):
                        worst_x = max(worst_x, float(np.max(dq)) / max(kappa, 1e-300))
            report.checks.append(AssumptionCheck(
                name="B3_eta_lipschitz_x",
                passed=bool(worst_x <= spec.eta.x_lipschitz * (1.0 + 1e-6) + 1e-12),
                detail=f"max x-quotient/(|z| ^ 1) = {worst_x:.6g} "
                       f"vs declared K2 = {spec.eta.x_lipschitz:.6g}"))
        if spec.eta.envelope is not None:
            env_ok = True
            env_witness = None
            for z, _w in atoms:
                kappa = min(1.0, abs(z))
                for xp in np.atleast_1d(x_probe_eta):
                    xs = np.full_like(grid, xp)
                    vals = np.abs(np.asarray(spec.eta(xs, grid, z), dtype=float))
                    cap = (float(np.asarray(spec.eta.envelope(np.array([xp])))[0])
                           * (1.0 + np.abs(grid)) * kappa)
                    over = vals > cap * (1.0 + 1e-6) + 1e-12
                    if np.any(over):
                        env_ok = False
                        i = int(np.argmax(over))
                        env_witness = {"x": float(xp), "u": float(grid[i]), "z": z,
                                       "value": float(vals[i]), "cap": float(cap[i])}
            report.checks.append(AssumptionCheck(
                name="B4_eta_envelope", passed=env_ok,
                detail="|eta(x,u;z)| <= g(x)(1+|u|)(|z| ^ 1) on grid" if env_ok
                       else "envelope bound violated",
                witness=env_witness))

    report.checks.append(AssumptionCheck(
        name="A6_levy_integrability", passed=True,
        detail=f"integral of (1 ^ z^2) m(dz) = {levy_integrability(spec.m):.6g}"))

    return report
