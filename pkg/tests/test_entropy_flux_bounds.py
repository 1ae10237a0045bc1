"""Derivative bounds of the doubled entropy flux (quadratic flux case).

The two surrogates checked here back the continuous-dependence analysis:
the b-derivative of f^beta stays within M2 * xi * sup|f''| of the
-beta'(a-b) f'(b) reference, and the upper-limit derivative of the flux
difference is controlled by sup|f' - g'|.
"""

import numpy as np
import pytest

from stoclaw import (Coefficient, entropy_flux,
                     entropy_flux_difference_partial_upper,
                     entropy_flux_partial_b, make_beta_family)

from conftest import burgers_flux

XI = 0.5
FAM = make_beta_family(XI)
F = burgers_flux(scale=0.5, u_bound=2.0)  # f'' = 1 everywhere
H = 0.3
G = Coefficient(fn=lambda u: 0.5 * np.asarray(u, dtype=float) ** 2
                + H * np.asarray(u, dtype=float), lipschitz=F.lipschitz + H)

AB_GRID = np.linspace(-2.0, 2.0, 100)


def test_partial_b_expansion_bound():
    # |d/db f^beta(a,b) + beta'(a-b) f'(b)| <= M2 * xi * sup|f''|
    bound = FAM.M2 * XI * 1.0 + 1e-6
    worst = 0.0
    for a in AB_GRID:
        fpb = np.asarray(F.derivative(AB_GRID), dtype=float)
        for b, fp in zip(AB_GRID, fpb):
            if a == b:
                continue
            surrogate = abs(entropy_flux_partial_b(F, FAM, a, b, panels=512)
                            + FAM.beta_prime(a - b) * fp)
            worst = max(worst, surrogate)
    assert worst <= bound, f"worst surrogate {worst} above bound {bound}"


def test_difference_partial_bound():
    # |d/db (f^beta(b,a) - g^beta(b,a))| <= sup|f' - g'| = H
    bound = H + 1e-6
    for a in AB_GRID:
        for b in AB_GRID:
            val = abs(entropy_flux_difference_partial_upper(F, G, FAM, b, a))
            assert val <= bound


def test_partial_b_cross_checks_against_finite_differences():
    h = 1e-5
    for a, b in ((1.5, -0.3), (-1.0, 0.8), (0.2, 0.1)):
        fd = (entropy_flux(F, FAM, a, b + h)
              - entropy_flux(F, FAM, a, b - h)) / (2.0 * h)
        assert entropy_flux_partial_b(F, FAM, a, b) == pytest.approx(
            fd, abs=1e-3)
