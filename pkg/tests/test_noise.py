"""Driving-noise generation: reproducibility, distributions, coarsening."""

import numpy as np
import pytest

from stoclaw import (InvalidArgumentError, LevyMeasure, NoisePath,
                     compensator_integral, levy_integrability,
                     make_noise_path, path_streams, sample_brownian,
                     sample_jumps)

from conftest import linear_eta


# ---------------------------------------------------------------------------
# measure


def test_measure_rejects_atom_at_zero():
    with pytest.raises(InvalidArgumentError):
        LevyMeasure(atoms=((0.0, 1.0),))


def test_measure_rejects_nonpositive_weight():
    with pytest.raises(InvalidArgumentError):
        LevyMeasure(atoms=((1.0, 0.0),))
    with pytest.raises(InvalidArgumentError):
        LevyMeasure(atoms=((1.0, -2.0),))


def test_total_rate_and_integrability():
    assert levy_integrability(LevyMeasure(atoms=((0.5, 3.0),))) == \
        pytest.approx(0.75)
    assert levy_integrability(LevyMeasure(atoms=())) == 0.0
    m = LevyMeasure(atoms=((2.0, 1.0), (0.1, 10.0)))
    assert levy_integrability(m) == pytest.approx(1.1)
    assert m.total_rate == pytest.approx(11.0)


# ---------------------------------------------------------------------------
# Brownian increments


def test_brownian_empty_and_errors():
    rng = np.random.default_rng(0)
    assert len(sample_brownian(rng, 0, 0.1)) == 0
    with pytest.raises(InvalidArgumentError):
        sample_brownian(rng, 10, 0.0)
    with pytest.raises(InvalidArgumentError):
        sample_brownian(rng, -1, 0.1)


def test_brownian_moments_regression():
    rng, _ = path_streams(base_seed=7, path_index=0)
    draws = sample_brownian(rng, 1_000_000, 1e-3)
    assert abs(float(np.mean(draws))) <= 4.0 * np.sqrt(1e-3 / 1e6)
    var = float(np.var(draws))
    assert 0.00099 <= var <= 0.00101


def test_brownian_determinism():
    a = sample_brownian(path_streams(3, 5)[0], 1000, 0.01)
    b = sample_brownian(path_streams(3, 5)[0], 1000, 0.01)
    assert np.array_equal(a, b)
    c = sample_brownian(path_streams(3, 6)[0], 1000, 0.01)
    assert not np.array_equal(a, c)


# ---------------------------------------------------------------------------
# jumps


def test_jumps_empty_measure():
    rng = np.random.default_rng(0)
    assert sample_jumps(rng, LevyMeasure(atoms=()), 1.0) == []


def test_jump_count_matches_poisson_mean():
    m = LevyMeasure(atoms=((1.0, 3.0),))
    rng = np.random.default_rng(2026)
    counts = [len(sample_jumps(rng, m, 2.0)) for _ in range(100_000)]
    assert float(np.mean(counts)) == pytest.approx(6.0, abs=0.1)


def test_jump_marks_follow_weights():
    m = LevyMeasure(atoms=((1.0, 1.0), (2.0, 3.0)))
    rng = np.random.default_rng(11)
    marks = []
    for _ in range(100_000):
        marks.extend(z for _, z in sample_jumps(rng, m, 1.0))
    frac = float(np.mean(np.asarray(marks) == 2.0))
    assert frac == pytest.approx(0.75, abs=0.01)


def test_jump_times_sorted_within_horizon():
    m = LevyMeasure(atoms=((1.0, 5.0),))
    rng = np.random.default_rng(4)
    for _ in range(50):
        jumps = sample_jumps(rng, m, 3.0)
        times = [t for t, _ in jumps]
        assert times == sorted(times)
        assert all(0.0 < t <= 3.0 for t in times)


# ---------------------------------------------------------------------------
# noise paths


def test_path_replay_determinism():
    m = LevyMeasure(atoms=((2.0, 1.5),))
    a = make_noise_path(m, base_seed=42, path_index=3, dt=0.01, n_steps=200)
    b = make_noise_path(m, base_seed=42, path_index=3, dt=0.01, n_steps=200)
    assert np.array_equal(a.brownian_increments, b.brownian_increments)
    assert a.jumps == b.jumps
    assert a.horizon == pytest.approx(2.0)


def test_jump_stream_does_not_perturb_brownian():
    m1 = LevyMeasure(atoms=((2.0, 1.5),))
    m2 = LevyMeasure(atoms=((0.5, 4.0), (3.0, 1.0)))
    a = make_noise_path(m1, base_seed=9, path_index=0, dt=0.01, n_steps=100)
    b = make_noise_path(m2, base_seed=9, path_index=0, dt=0.01, n_steps=100)
    assert np.array_equal(a.brownian_increments, b.brownian_increments)
    assert a.jumps != b.jumps


def test_path_coarsen_block_sums():
    m = LevyMeasure(atoms=((1.0, 2.0),))
    path = make_noise_path(m, base_seed=1, path_index=0, dt=0.005, n_steps=64)
    coarse = path.coarsen(4)
    assert coarse.dt == pytest.approx(0.02)
    assert coarse.n_steps == 16
    expected = path.brownian_increments.reshape(16, 4).sum(axis=1)
    assert np.array_equal(coarse.brownian_increments, expected)
    assert coarse.jumps == path.jumps
    assert coarse.horizon == pytest.approx(path.horizon)


def test_path_coarsen_factor_one_is_identity():
    path = make_noise_path(LevyMeasure(atoms=()), 1, 0, dt=0.01, n_steps=8)
    assert path.coarsen(1) is path


def test_path_coarsen_rejects_bad_factors():
    path = make_noise_path(LevyMeasure(atoms=()), 1, 0, dt=0.01, n_steps=10)
    with pytest.raises(InvalidArgumentError):
        path.coarsen(0)
    with pytest.raises(InvalidArgumentError):
        path.coarsen(3)  # 10 not divisible by 3


def test_path_rejects_jumps_outside_horizon():
    with pytest.raises(InvalidArgumentError):
        NoisePath(dt=0.1, brownian_increments=np.zeros(10),
                  jumps=((1.5, 2.0),))
    with pytest.raises(InvalidArgumentError):
        NoisePath(dt=0.1, brownian_increments=np.zeros(10),
                  jumps=((0.5, 2.0), (0.5, 2.0)))  # not strictly increasing


# ---------------------------------------------------------------------------
# compensator


def test_compensator_linear_eta_single_atom():
    eta = linear_eta(0.4)
    m = LevyMeasure(atoms=((2.0, 1.5),))
    assert compensator_integral(eta, m, 0.0, 2.0) == pytest.approx(1.2)


def test_compensator_vanishes_at_zero():
    eta = linear_eta(0.4)
    m = LevyMeasure(atoms=((2.0, 1.5),))
    assert compensator_integral(eta, m, 0.0, 0.0) == 0.0


def test_compensator_two_atoms():
    eta = linear_eta(0.4)
    m = LevyMeasure(atoms=((0.5, 2.0), (3.0, 1.0)))
    assert compensator_integral(eta, m, 0.0, 1.0) == pytest.approx(0.8)


def test_compensator_vectorized_over_grid():
    eta = linear_eta(0.4)
    m = LevyMeasure(atoms=((2.0, 1.5),))
    u = np.array([0.0, 1.0, 2.0])
    got = compensator_integral(eta, m, np.zeros(3), u)
    assert np.allclose(got, 0.6 * u)
