"""Exact inference in a two-state hidden Markov model.

A machine drifts between a good and a worn state; each day it produces a
part that passes or fails inspection. Watching only pass/fail, we track
the probability the machine is worn, smooth that estimate in hindsight,
and decode the single most probable state history.
"""

import numpy as np

from ssmkit import (
    DiscreteHMM,
    ObservationSeries,
    SeededGenerator,
    backward_smooth,
    forward_filter,
    simulate_hmm,
    viterbi,
)

GOOD, WORN = 0, 1
PASS, FAIL = 0, 1

model = DiscreteHMM(
    initial=[0.9, 0.1],
    transition=[[0.95, 0.05], [0.10, 0.90]],
    emission=[[0.99, 0.01], [0.70, 0.30]],
)


def main():
    states, obs = simulate_hmm(model, 60, SeededGenerator(420))
    print(f"simulated {obs.values.shape[0]} days; machine was worn on "
          f"{int((states.states == WORN).sum())} of them\n")

    fwd = forward_filter(model, obs)
    smooth = backward_smooth(model, obs, fwd)
    path, log_joint = viterbi(model, obs)

    print("day  result  P(worn | so far)  P(worn | all days)  decoded  truth")
    for t in range(25):
        symbol = "fail" if obs.values[t] == FAIL else "pass"
        print(f"{t + 1:>3}  {symbol:>6}  {fwd.filtered[t, WORN]:>16.3f}"
              f"  {smooth.smoothed[t, WORN]:>18.3f}"
              f"  {'worn' if path.states[t] == WORN else 'good':>7}"
              f"  {'worn' if states.states[t] == WORN else 'good':>5}")
    print("...\n")

    print(f"log-likelihood of the record: {fwd.log_likelihood:.4f}")
    print(f"log-probability of the decoded path: {log_joint:.4f}")

    # Smoothing sees the future, so it reacts to a failure streak earlier
    # and recovers from isolated failures faster than filtering does.
    hits_filter = np.mean((fwd.filtered.argmax(axis=1)) == states.states)
    hits_smooth = np.mean((smooth.smoothed.argmax(axis=1)) == states.states)
    hits_viterbi = np.mean(path.states == states.states)
    print(f"\nper-day accuracy  filter {hits_filter:.2%}  "
          f"smoother {hits_smooth:.2%}  decoded path {hits_viterbi:.2%}")


if __name__ == "__main__":
    main()
