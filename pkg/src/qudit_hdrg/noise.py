"""Uncorrelated qudit noise: X^k data errors and additive measurement shifts.

Each non-trivial charge k in [1, d-1] is drawn with probability p/(d-1), so a
site is hit with total probability p. Random streams are derived from
``(master seed, key..., purpose)`` through :class:`numpy.random.SeedSequence`
spawn keys feeding a counter-based Philox generator, so a trial's draws do not
depend on which worker runs it or in what order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import CodeGeometry, compute_syndrome

# Fixed numeric tags for the sub-streams of one trial.
STREAM_TAGS = {"trial": 1, "percolation": 2, "bench": 3}


@dataclass(frozen=True)
class NoiseParams:
    p: float
    d: int

    def __post_init__(self):
        if not 0.0 <= self.p < 1.0:
            raise ValueError(f"error rate must lie in [0, 1), got {self.p}")
        if int(self.d) != self.d or self.d < 2:
            raise ValueError(f"qudit dimension must be an integer >= 2, got {self.d}")


def rng_stream(seed: int, *key: int, purpose: str = "trial") -> np.random.Generator:
    """Deterministic generator for ``(seed, key..., purpose)``.

    ``seed`` is a 64-bit unsigned master seed; ``key`` is any tuple of
    non-negative integers identifying the trial (cell parameters, trial index).
    """
    if not 0 <= seed < 2**64:
        raise ValueError("master seed must be a 64-bit unsigned integer")
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(*key, STREAM_TAGS[purpose]))
    return np.random.Generator(np.random.Philox(ss))


def _sample_charges(p: float, d: int, shape, rng: np.random.Generator) -> np.ndarray:
    # one uniform per site: u < p marks an error, u/p is then uniform and picks k
    u = rng.random(shape)
    hit = u < p
    out = np.zeros(shape, dtype=np.int64)
    if p > 0:
        k = 1 + np.minimum((u[hit] / p * (d - 1)).astype(np.int64), d - 2)
        out[hit] = k
    return out


def sample_qudit_noise(params: NoiseParams, g: CodeGeometry, rng: np.random.Generator, layers: int | None = None) -> np.ndarray:
    """Fresh X^k errors for one error layer, or ``layers`` independent ones stacked."""
    shape = (g.n_edges,) if layers is None else (layers, g.n_edges)
    return _sample_charges(params.p, params.d, shape, rng)


def sample_measurement_noise(params: NoiseParams, g: CodeGeometry, rng: np.random.Generator, layers: int | None = None) -> np.ndarray:
    """Additive outcome shifts over the plaquette grid (added mod d to true syndromes)."""
    shape = g.syndrome_shape if layers is None else (layers, *g.syndrome_shape)
    return _sample_charges(params.p, params.d, shape, rng)


def generate_histories(params: NoiseParams, g: CodeGeometry, T: int, rng: np.random.Generator):
    """Accumulated error history and noisy syndrome history over ``T`` rounds.

    Returns ``(errors, syndromes)`` with shapes ``(T, n_edges)`` and
    ``(T, L, L-1)``: ``errors[t]`` is the sum of all fresh layers up to round
    t+1, ``syndromes[t]`` its syndrome plus fresh measurement noise.
    """
    if T < 1:
        raise ValueError("need at least one time step")
    fresh = sample_qudit_noise(params, g, rng, layers=T)
    errors = np.mod(np.cumsum(fresh, axis=0), params.d)
    shifts = sample_measurement_noise(params, g, rng, layers=T)
    syndromes = np.mod(compute_syndrome(errors, g, params.d) + shifts, params.d)
    return errors, syndromes
