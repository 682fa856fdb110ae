"""Forward simulators: determinism, structural identities, moment checks."""

import numpy as np
import pytest

from ssmkit import (
    DiscreteHMM,
    LinearGaussianModel,
    ModelValidationError,
    SeededGenerator,
    simulate_hmm,
    simulate_lgssm,
)


def two_state_hmm():
    return DiscreteHMM([0.5, 0.5], [[0.9, 0.1], [0.2, 0.8]], [[0.8, 0.2], [0.3, 0.7]])


class TestSimulateHmm:
    def test_identity_emission_observations_equal_states(self):
        m = DiscreteHMM([0.5, 0.5], [[0.9, 0.1], [0.2, 0.8]], np.eye(2))
        path, obs = simulate_hmm(m, 500, SeededGenerator(4))
        np.testing.assert_array_equal(path.states, obs.values)

    def test_same_seed_bit_identical(self):
        p1, o1 = simulate_hmm(two_state_hmm(), 200, SeededGenerator(12))
        p2, o2 = simulate_hmm(two_state_hmm(), 200, SeededGenerator(12))
        np.testing.assert_array_equal(p1.states, p2.states)
        np.testing.assert_array_equal(o1.values, o2.values)

    def test_empirical_transition_frequencies(self):
        m = two_state_hmm()
        path, _ = simulate_hmm(m, 100_000, SeededGenerator(2024))
        s = path.states
        for i in range(2):
            from_i = s[:-1] == i
            for j in range(2):
                freq = np.mean(s[1:][from_i] == j)
                assert abs(freq - m.transition[i, j]) < 0.01

    def test_uninformative_dynamics_marginal(self):
        r = np.array([0.35, 0.65])
        m = DiscreteHMM(r, [r, r], [[0.8, 0.2], [0.3, 0.7]])
        path, _ = simulate_hmm(m, 100_000, SeededGenerator(5))
        assert abs(np.mean(path.states == 1) - r[1]) < 0.01

    def test_t_must_be_positive(self):
        with pytest.raises(ValueError):
            simulate_hmm(two_state_hmm(), 0, SeededGenerator(1))

    def test_invalid_model_rejected(self):
        bad = DiscreteHMM([0.5, 0.5], [[0.5, 0.4], [0.2, 0.8]], [[1.0, 0.0], [0.0, 1.0]])
        with pytest.raises(ModelValidationError):
            simulate_hmm(bad, 5, SeededGenerator(1))


class TestSimulateLgssm:
    def test_deterministic_fixed_point(self):
        m = LinearGaussianModel(
            A=np.eye(2), C=np.eye(2), Q=np.zeros((2, 2)), R=np.eye(2),
            mu0=[1.5, -2.0], Sigma0=np.zeros((2, 2)),
        )
        path, _ = simulate_lgssm(m, 10, SeededGenerator(3))
        np.testing.assert_allclose(path.states, np.tile([1.5, -2.0], (10, 1)))

    def test_zero_state_noise_is_linear_orbit(self):
        m = LinearGaussianModel(
            A=[[0.5]], C=[[1.0]], Q=[[0.0]], R=[[1.0]], mu0=[8.0], Sigma0=[[0.0]]
        )
        path, _ = simulate_lgssm(m, 6, SeededGenerator(3))
        np.testing.assert_allclose(
            path.states[:, 0], 8.0 * 0.5 ** np.arange(6), rtol=1e-14
        )

    def test_same_seed_bit_identical(self):
        m = LinearGaussianModel(
            A=[[0.9]], C=[[1.0]], Q=[[0.1]], R=[[0.5]], mu0=[0.0], Sigma0=[[1.0]]
        )
        p1, o1 = simulate_lgssm(m, 100, SeededGenerator(8))
        p2, o2 = simulate_lgssm(m, 100, SeededGenerator(8))
        np.testing.assert_array_equal(p1.states, p2.states)
        np.testing.assert_array_equal(o1.values, o2.values)

    def test_observation_noise_moment(self):
        m = LinearGaussianModel(
            A=[[1.0]], C=[[1.0]], Q=[[0.1]], R=[[0.5]], mu0=[0.0], Sigma0=[[1.0]]
        )
        path, obs = simulate_lgssm(m, 100_000, SeededGenerator(77))
        noise = obs.values[:, 0] - path.states[:, 0]
        assert abs(noise.var() - 0.5) < 0.01  # within 2% of R

    def test_rejects_indefinite_q(self):
        m = LinearGaussianModel(
            A=np.eye(2), C=np.eye(2), Q=[[1.0, 2.0], [2.0, 1.0]], R=np.eye(2),
            mu0=np.zeros(2), Sigma0=np.eye(2),
        )
        with pytest.raises(ModelValidationError):
            simulate_lgssm(m, 5, SeededGenerator(1))
