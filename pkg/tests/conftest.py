"""Shared problem builders for the test suite."""

import numpy as np
import pytest

from stoclaw import (BrownianCoefficient, Coefficient, Grid, JumpCoefficient,
                     LevyMeasure, ProblemSpec, zero_brownian, zero_flux,
                     zero_jump)


def burgers_flux(scale=0.5, u_bound=2.0):
    return Coefficient(fn=lambda u: scale * np.asarray(u, dtype=float) ** 2,
                       lipschitz=2.0 * scale * u_bound,
                       second_derivative_bound=2.0 * scale, name="burgers")


def linear_flux(c=1.0):
    return Coefficient(fn=lambda u: c * np.asarray(u, dtype=float),
                       lipschitz=abs(c), second_derivative_bound=0.0,
                       name="linear")


def linear_diffusion(a=0.5):
    return Coefficient(fn=lambda u: a * np.asarray(u, dtype=float),
                       lipschitz=a, second_derivative_bound=0.0, name="linear")


def linear_sigma(lam=0.2):
    return BrownianCoefficient.from_u(
        lambda u: lam * np.asarray(u, dtype=float), lipschitz=lam,
        name="linear")


def linear_eta(gamma=0.3):
    return JumpCoefficient.from_u(
        lambda u, z: gamma * np.asarray(u, dtype=float)
        * min(1.0, abs(float(z))),
        lambda_star=gamma, linear_bound=gamma, name="linear")


def make_spec(cells=32, domain_length=1.0, u0=None, f=None, A=None,
              sigma=None, eta=None, m=None):
    if u0 is None:
        x = (np.arange(cells) + 0.5) * (domain_length / cells)
        u0 = 0.5 + 0.25 * np.sin(2.0 * np.pi * x / domain_length)
    return ProblemSpec(
        f=f if f is not None else zero_flux(),
        A=A if A is not None else zero_flux(),
        sigma=sigma if sigma is not None else zero_brownian(),
        eta=eta if eta is not None else zero_jump(),
        m=m if m is not None else LevyMeasure(atoms=()),
        u0=np.asarray(u0, dtype=float),
        domain_length=domain_length,
        cells=cells)


@pytest.fixture
def unit_grid():
    return Grid(cells=64, domain_length=1.0)
