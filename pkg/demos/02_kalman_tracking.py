"""Tracking a drifting signal with the Kalman filter and RTS smoother.

The hidden signal is a mean-reverting random walk observed through noise
roughly twice as strong as the innovations. The filter cuts the error of
the raw readings; the smoother, allowed to look ahead, cuts it further;
multi-step prediction shows uncertainty growing back to the prior.
"""

import numpy as np

from ssmkit import (
    LinearGaussianModel,
    SeededGenerator,
    kalman_filter,
    kalman_predict,
    rts_smoother,
    simulate_lgssm,
)

model = LinearGaussianModel(
    A=[[0.95]], C=[[1.0]], Q=[[0.1]], R=[[0.5]], mu0=[0.0], Sigma0=[[1.0]]
)


def rmse(a, b):
    return float(np.sqrt(np.mean((np.asarray(a) - np.asarray(b)) ** 2)))


def main():
    states, obs = simulate_lgssm(model, 200, SeededGenerator(7))
    truth = states.states[:, 0]
    readings = obs.values[:, 0]

    kf = kalman_filter(model, obs)
    sm = rts_smoother(model, kf)

    print(f"log-likelihood of the record: {kf.log_likelihood:.4f}\n")
    print("estimate errors against the hidden signal (RMSE):")
    print(f"  raw readings     {rmse(readings, truth):.4f}")
    print(f"  filtered means   {rmse(kf.filtered_means[:, 0], truth):.4f}")
    print(f"  smoothed means   {rmse(sm.smoothed_means[:, 0], truth):.4f}")

    steady = kf.filtered_covs[-1, 0, 0]
    print(f"\nfiltered variance settles at {steady:.4f} "
          f"(started at {kf.filtered_covs[0, 0, 0]:.4f})")

    # Prediction from the last filtered state: the mean decays toward zero
    # and the variance climbs to the stationary value q / (1 - a^2).
    steps = kalman_predict(model, kf.filtered_means[-1], kf.filtered_covs[-1], k=15)
    stationary = 0.1 / (1 - 0.95**2)
    print(f"\nforecast from day 200 (stationary variance {stationary:.3f}):")
    print("steps ahead   mean    variance")
    for k in (1, 2, 5, 10, 15):
        mean, cov = steps[k - 1]
        print(f"{k:>11}  {mean[0]:>6.3f}  {cov[0, 0]:>9.4f}")


if __name__ == "__main__":
    main()
