"""stoclaw: simulate degenerate convection-diffusion balance laws driven by
Brownian and compensated-Poisson noise, and estimate the quantities their
well-posedness theory controls: total variation, viscosity convergence
rates, continuous dependence on coefficients, and fractional BV moduli."""

from .errors import (BlowUpError, ConfigError, EstimationImpossibleError,
                     InvalidArgumentError, MonotonicityError)
from .estimators import (EstimateSummary, RateFit, ResidualEvaluator,
                         TestFunction, entropy_residual_expectation,
                         fit_rate, make_bump_test_function, mollified_modulus,
                         monte_carlo, shift_modulus, total_variation,
                         triangular_kernel, weighted_l1_distance)
from .model import (BetaFamily, BrownianCoefficient, Coefficient,
                    EntropyTriple, JumpCoefficient, ProblemSpec,
                    ValidationReport, entropy_flux,
                    entropy_flux_difference_partial_upper,
                    entropy_flux_partial_b, functional_D, functional_E,
                    kirchhoff, make_beta_family, make_entropy_triple,
                    validate_assumptions, zero_brownian, zero_flux,
                    zero_jump)
from .noise import (LevyMeasure, NoisePath, compensator_integral,
                    levy_integrability, make_noise_path, path_streams,
                    sample_brownian, sample_jumps)
from .solver import (Grid, State, Trajectory, numerical_flux, solve_coupled,
                     solve_path, stable_dt, step, write_snapshots)

__version__ = "0.1.0"

__all__ = [
    "BlowUpError", "ConfigError", "EstimationImpossibleError",
    "InvalidArgumentError", "MonotonicityError",
    "EstimateSummary", "RateFit", "ResidualEvaluator", "TestFunction",
    "entropy_residual_expectation", "fit_rate", "make_bump_test_function",
    "mollified_modulus", "monte_carlo", "shift_modulus", "total_variation",
    "triangular_kernel", "weighted_l1_distance",
    "BetaFamily", "BrownianCoefficient", "Coefficient", "EntropyTriple",
    "JumpCoefficient", "ProblemSpec", "ValidationReport", "entropy_flux",
    "entropy_flux_difference_partial_upper", "entropy_flux_partial_b",
    "functional_D", "functional_E", "kirchhoff", "make_beta_family",
    "make_entropy_triple", "validate_assumptions", "zero_brownian",
    "zero_flux", "zero_jump",
    "LevyMeasure", "NoisePath", "compensator_integral", "levy_integrability",
    "make_noise_path", "path_streams", "sample_brownian", "sample_jumps",
    "Grid", "State", "Trajectory", "numerical_flux", "solve_coupled",
    "solve_path", "stable_dt", "step", "write_snapshots",
    "__version__",
]
