"""Driving noise: scalar Brownian increments and finite-activity jump measures.

One realization (a NoisePath) bundles the Brownian increments on a fixed time
grid with the exact jump times and marks of a compensated Poisson random
measure, so that two coupled equations can consume the identical realization.
Paths are reproducible from a (base_seed, path_index) pair; the Brownian and
jump substreams are split deterministically so that adding or removing jumps
never perturbs the Brownian draw sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidArgumentError


@dataclass(frozen=True)
class LevyMeasure:
    """Atomic jump intensity: finitely many atoms (z, weight), weight > 0."""

    atoms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        norm = tuple((float(z), float(w)) for z, w in self.atoms)
        object.__setattr__(self, "atoms", norm)
        for z, w in self.atoms:
            if z == 0.0:
                raise InvalidArgumentError("Levy measure cannot carry an atom at z=0")
            if w <= 0.0:
                raise InvalidArgumentError(f"atom weight must be positive, got {w}")

    @property
    def total_rate(self) -> float:
        return float(sum(w for _, w in self.atoms))

    @property
    def locations(self) -> np.ndarray:
        return np.array([z for z, _ in self.atoms], dtype=float)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.atoms], dtype=float)


def levy_integrability(m: LevyMeasure) -> float:
    """Integral of 1 ∧ z² against the measure; finite for every atomic m."""
    return float(sum(w * min(1.0, z * z) for z, w in m.atoms))


def path_streams(base_seed: int, path_index: int):
    """Return (brownian_rng, jump_rng) for one path, deterministically split."""
    root = np.random.SeedSequence(entropy=base_seed, spawn_key=(path_index,))
    b_seq, j_seq = root.spawn(2)
    return np.random.default_rng(b_seq), np.random.default_rng(j_seq)


def sample_brownian(rng: np.random.Generator, n_steps: int, dt: float) -> np.ndarray:
    """n_steps independent N(0, dt) increments; empty array for n_steps=0."""
    if dt <= 0.0:
        raise InvalidArgumentError(f"dt must be positive, got {dt}")
    if n_steps < 0:
        raise InvalidArgumentError(f"n_steps must be nonnegative, got {n_steps}")
    return rng.normal(0.0, math.sqrt(dt), n_steps)


def sample_jumps(
    rng: np.random.Generator, m: LevyMeasure, horizon: float
) -> list[tuple[float, float]]:
    """Jump times and marks on (0, horizon], time-sorted.

    The count is Poisson(total_rate * horizon), times are uniform on the
    interval, and each mark is an atom location chosen proportionally to its
    weight.  Draw order (count, times, marks) is fixed for reproducibility.
    """
    if horizon <= 0.0:
        raise InvalidArgumentError(f"horizon must be positive, got {horizon}")
    rate = m.total_rate
    if rate == 0.0:
        return []
    count = int(rng.poisson(rate * horizon))
    if count == 0:
        return []
    times = horizon - rng.random(count) * horizon  # uniform on (0, horizon]
    probs = m.weights / rate
    marks = m.locations[rng.choice(len(m.atoms), size=count, p=probs)]
    order = np.argsort(times, kind="stable")
    return [(float(times[i]), float(marks[i])) for i in order]


@dataclass(frozen=True)
class NoisePath:
    """One noise realization on a fixed step grid.

    brownian_increments[n] is W((n+1)dt) - W(n dt); jumps are (time, mark)
    pairs with times in (0, T], strictly sorted.
    """

    dt: float
    brownian_increments: np.ndarray
    jumps: tuple[tuple[float, float], ...]
    base_seed: int = 0
    path_index: int = 0

    def __post_init__(self):
        if self.dt <= 0.0:
            raise InvalidArgumentError(f"dt must be positive, got {self.dt}")
        inc = np.asarray(self.brownian_increments, dtype=float)
        object.__setattr__(self, "brownian_increments", inc)
        object.__setattr__(
            self, "jumps", tuple((float(t), float(z)) for t, z in self.jumps)
        )
        horizon = self.horizon
        previous = 0.0
        for t, _ in self.jumps:
            if not (previous < t <= horizon + 1e-12 * max(1.0, horizon)):
                raise InvalidArgumentError(
                    f"jump time {t} outside (previous, horizon] = ({previous}, {horizon}]"
                )
            previous = t

    @property
    def n_steps(self) -> int:
        return len(self.brownian_increments)

    @property
    def horizon(self) -> float:
        return self.dt * self.n_steps

    def coarsen(self, factor: int) -> "NoisePath":
        """Sum increments in blocks of `factor`; jumps are shared unchanged."""
        if factor < 1:
            raise InvalidArgumentError(f"coarsen factor must be >= 1, got {factor}")
        if factor == 1:
            return self
        if self.n_steps % factor != 0:
            raise InvalidArgumentError(
                f"step count {self.n_steps} not divisible by factor {factor}"
            )
        blocks = self.brownian_increments.reshape(-1, factor).sum(axis=1)
        return NoisePath(
            dt=self.dt * factor,
            brownian_increments=blocks,
            jumps=self.jumps,
            base_seed=self.base_seed,
            path_index=self.path_index,
        )


def make_noise_path(
    m: LevyMeasure, base_seed: int, path_index: int, dt: float, n_steps: int
) -> NoisePath:
    """Generate the full path for (base_seed, path_index); bit-reproducible."""
    brng, jrng = path_streams(base_seed, path_index)
    increments = sample_brownian(brng, n_steps, dt)
    horizon = dt * n_steps
    jumps = sample_jumps(jrng, m, horizon) if m.atoms and horizon > 0 else []
    return NoisePath(
        dt=dt,
        brownian_increments=increments,
        jumps=tuple(jumps),
        base_seed=base_seed,
        path_index=path_index,
    )


def compensator_integral(eta, m: LevyMeasure, x, u):
    """Exact compensator drift sum Σ_k η(x, u; z_k) · weight_k.

    `eta` is called as eta(x, u, z); scalar and array (x, u) both work when
    the coefficient is vectorized.
    """
    total = 0.0
    for z, w in m.atoms:
        total = total + w * eta(x, u, z)
    return total
