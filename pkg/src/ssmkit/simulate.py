"""Forward simulation of each model class.

Draw order is part of the determinism contract.  For an HMM: T uniforms for
the state chain (one per step), then T uniforms for the symbols.  For a
linear-Gaussian model: d_x normals for the initial state, (T-1)*d_x normals
for the state noise in time order, then T*d_y normals for the observation
noise in time order.  Every normal consumes two raw generator outputs.
"""

from __future__ import annotations

import numpy as np

from .models import (
    DiscreteHMM,
    LinearGaussianModel,
    ObservationSeries,
    StatePath,
    require_valid,
)
from .numerics import psd_sampling_factor
from .rng import SeededGenerator

__all__ = ["simulate_hmm", "simulate_lgssm"]


def _categorical(u: float, cumulative: np.ndarray) -> int:
    # Index of the first cumulative entry exceeding u; clipped so roundoff
    # in the final entry cannot produce an out-of-range index.
    return min(int(np.searchsorted(cumulative, u, side="right")), cumulative.shape[0] - 1)


def simulate_hmm(
    model: DiscreteHMM, T: int, rng: SeededGenerator
) -> tuple[StatePath, ObservationSeries]:
    """Sample a state chain of length T and one symbol per state."""
    require_valid(model)
    if T < 1:
        raise ValueError("T must be at least 1")
    cum_init = np.cumsum(model.initial)
    cum_trans = np.cumsum(model.transition, axis=1)
    cum_emit = np.cumsum(model.emission, axis=1)

    u_states = rng.uniforms(T)
    states = np.empty(T, dtype=np.int64)
    states[0] = _categorical(u_states[0], cum_init)
    for t in range(1, T):
        states[t] = _categorical(u_states[t], cum_trans[states[t - 1]])

    u_obs = rng.uniforms(T)
    rows = cum_emit[states]
    symbols = np.minimum(
        np.sum(u_obs[:, None] >= rows, axis=1), model.M - 1
    ).astype(np.int64)
    return StatePath(states), ObservationSeries(symbols, kind="symbolic")


def simulate_lgssm(
    model: LinearGaussianModel, T: int, rng: SeededGenerator
) -> tuple[StatePath, ObservationSeries]:
    """Sample x_1 ~ N(mu0, Sigma0), propagate with noise Q, observe with R."""
    require_valid(model)
    if T < 1:
        raise ValueError("T must be at least 1")
    d_x, d_y = model.d_x, model.d_y
    l_init = psd_sampling_factor(model.Sigma0, "Sigma0")
    l_state = psd_sampling_factor(model.Q, "Q")
    l_obs = psd_sampling_factor(model.R, "R")

    states = np.empty((T, d_x))
    states[0] = model.mu0 + l_init @ rng.normals(d_x)
    if T > 1:
        noise = rng.normals((T - 1) * d_x).reshape(T - 1, d_x) @ l_state.T
        for t in range(1, T):
            states[t] = model.A @ states[t - 1] + noise[t - 1]
    obs = states @ model.C.T + rng.normals(T * d_y).reshape(T, d_y) @ l_obs.T
    return StatePath(states), ObservationSeries(obs, kind="real")
