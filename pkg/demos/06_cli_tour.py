"""A tour of the command-line interface.

Every subcommand reads model documents (JSON) and observation series
(CSV), writes plot-ready CSV, and prints a one-line JSON summary to
stdout. This script drives the CLI end to end in a temporary directory:
simulate data, filter it, learn the model back, and probe forgetting.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

from ssmkit import DiscreteHMM, LinearGaussianModel, write_model


def cli(*args):
    cmd = [sys.executable, "-m", "ssmkit", *args]
    print(f"$ ssmkit {' '.join(args)}")
    result = subprocess.run(cmd, capture_output=True, text=True, check=True)
    summary = json.loads(result.stdout)
    print(f"  -> {json.dumps(summary, indent=None)}\n")
    return summary


def main():
    workdir = Path(tempfile.mkdtemp(prefix="ssmkit_tour_"))
    hmm_path = str(workdir / "chain.json")
    lg_path = str(workdir / "tracker.json")
    write_model(hmm_path, DiscreteHMM(
        [0.5, 0.5], [[0.9, 0.1], [0.2, 0.8]], [[0.8, 0.2], [0.3, 0.7]]
    ))
    write_model(lg_path, LinearGaussianModel(
        A=[[0.9]], C=[[1.0]], Q=[[0.19]], R=[[0.5]], mu0=[0.0], Sigma0=[[1.0]]
    ))
    symbols = str(workdir / "symbols.csv")
    readings = str(workdir / "readings.csv")

    cli("simulate", "--model", hmm_path, "--T", "300", "--seed", "1", "--out", symbols)
    cli("simulate", "--model", lg_path, "--T", "150", "--seed", "2", "--out", readings)

    filtered = str(workdir / "filtered.csv")
    cli("filter", "--model", hmm_path, "--data", symbols, "--out", filtered)
    head = Path(filtered).read_text().splitlines()[:4]
    print("  first rows of the filtered posterior:")
    for line in head:
        print(f"    {line}")
    print()

    cli("loglik", "--model", hmm_path, "--data", symbols)

    fitted = str(workdir / "fitted.json")
    cli("fit", "--model", hmm_path, "--data", symbols, "--method", "em",
        "--tol", "1e-5", "--max-iter", "200", "--out", fitted)

    cli("pf", "--model", lg_path, "--data", readings, "--particles", "2000",
        "--seed", "3", "--out", str(workdir / "pf.csv"))

    cli("forget", "--model", hmm_path, "--data", symbols,
        "--prior-a", "1,0", "--prior-b", "0,1", "--out", str(workdir / "tv.csv"))

    print(f"all output files left in {workdir} for inspection")


if __name__ == "__main__":
    main()
