"""Invariants and frozen values of the convex absolute-value approximation."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stoclaw import InvalidArgumentError, make_beta_family

XIS = (0.05, 0.1, 0.5, 1.0)


def check_invariants(xi, r, tol=1e-12):
    fam = make_beta_family(xi)
    b = np.asarray(fam.beta(r))
    bp = np.asarray(fam.beta_prime(r))
    bpp = np.asarray(fam.beta_double_prime(r))
    a = np.abs(r)

    # symmetry and convexity
    assert abs(float(fam.beta(0.0))) <= tol
    assert np.all(np.abs(b - fam.beta(-r)) <= tol)
    assert np.all(np.abs(bp + fam.beta_prime(-r)) <= tol)
    assert np.all(bpp >= -tol)

    # saturation and slope cap
    outside = a >= xi
    assert np.all(np.abs(bp[outside] - np.sign(r[outside])) <= tol)
    assert np.all(np.abs(bp) <= 1.0 + tol)

    # two-sided envelope |r| - M1*xi <= beta <= |r|
    assert np.all(b <= a + tol)
    assert np.all(b >= a - fam.M1 * xi - tol)

    # curvature cap and compact support of beta''
    assert np.all(bpp <= fam.M2 / xi + tol)
    assert np.all(bpp[a > xi] <= tol)

    # r^2 beta''(r) <= 2 beta(r) for r > 0
    pos = r > 0
    assert np.all(r[pos] ** 2 * bpp[pos] <= 2.0 * b[pos] + tol)

    # beta(alpha r) <= alpha^2 beta(r) for alpha >= 1
    for alpha in (1.0, 1.5, 2.0, 4.0):
        assert np.all(fam.beta(alpha * r) <= alpha * alpha * b + tol)


@pytest.mark.parametrize("xi", XIS)
def test_invariants_on_dense_grid(xi):
    r = np.linspace(-5.0, 5.0, 10_000)
    check_invariants(xi, r)


def test_frozen_values():
    fam = make_beta_family(0.5)
    # closed form on [0, xi]: beta_xi(r) = xi * ((r/xi)^2 - (r/xi)^3 / 3)
    assert fam.beta(0.25) == pytest.approx(0.10416666666666667, abs=1e-12)
    # beyond the kernel: beta_xi(r) = |r| - xi/3
    assert fam.beta(2.0) == pytest.approx(2.0 - 0.5 / 3.0, abs=1e-12)
    assert 2.0 - fam.M1 * 0.5 <= fam.beta(2.0) <= 2.0
    assert fam.beta(0.0) == 0.0
    assert fam.beta_prime(0.0) == 0.0
    assert fam.M1 == pytest.approx(1.0 / 3.0)
    assert fam.M2 == pytest.approx(2.0)


def test_derivatives_match_finite_differences():
    fam = make_beta_family(0.3)
    r = np.linspace(-1.0, 1.0, 2001)
    h = 1e-6
    fd = (fam.beta(r + h) - fam.beta(r - h)) / (2.0 * h)
    assert np.max(np.abs(fd - fam.beta_prime(r))) < 5e-6
    fd2 = (fam.beta_prime(r + h) - fam.beta_prime(r - h)) / (2.0 * h)
    assert np.max(np.abs(fd2 - fam.beta_double_prime(r))) < 5e-5


@pytest.mark.parametrize("xi", [0.0, -1.0, float("inf"), float("nan")])
def test_rejects_bad_xi(xi):
    with pytest.raises(InvalidArgumentError):
        make_beta_family(xi)


@settings(max_examples=50, deadline=None)
@given(xi=st.floats(min_value=0.01, max_value=10.0),
       seed=st.integers(min_value=0, max_value=2**31))
def test_invariants_hold_for_random_family(xi, seed):
    rng = np.random.default_rng(seed)
    r = rng.uniform(-5.0 * xi, 5.0 * xi, size=64)
    check_invariants(xi, r, tol=1e-10 * max(1.0, xi))
