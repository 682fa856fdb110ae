"""Command-line interface.

Each subcommand reads a model document (JSON) and, where applicable, a
series file (CSV), writes CSV or JSON output through atomic renames, and
prints a single-line JSON summary to standard output.  Exit codes: 0
success, 1 usage error, 2 model or data error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .errors import DataFormatError, ModelValidationError, NumericalError
from .estimation import fit_mle
from .forgetting import dobrushin_coefficient, forgetting_curve
from .hmm import backward_smooth, fit_em, forward_filter, predict_states
from .io import parse_model, read_series, write_model, write_series, write_table
from .kalman import kalman_filter, kalman_predict, rts_smoother
from .models import DiscreteHMM, LinearGaussianModel
from .numerics import gaussian_logpdf
from .particle import bootstrap_filter, fixed_lag_smoother, lgssm_as_generic
from .rng import SeededGenerator
from .simulate import simulate_hmm, simulate_lgssm

__all__ = ["run_command", "main"]


class _UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; route through the usage
    # error path instead so the documented exit code 1 applies.
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="ssmkit", description="state-space model inference")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="sample a series from a model")
    p.add_argument("--model", required=True)
    p.add_argument("--T", required=True, type=int)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--out", required=True)

    for name, blurb in (
        ("filter", "filtered state distributions"),
        ("smooth", "smoothed state distributions"),
        ("loglik", "exact log-likelihood"),
    ):
        p = sub.add_parser(name, help=blurb)
        p.add_argument("--model", required=True)
        p.add_argument("--data", required=True)
        p.add_argument("--out", default=None)

    p = sub.add_parser("predict", help="push the final filter k steps ahead")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--k", required=True, type=int)
    p.add_argument("--out", required=True)

    p = sub.add_parser("fit", help="fit parameters by EM or Nelder-Mead MLE")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--method", choices=("em", "mle"), default=None)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--out", required=True)

    p = sub.add_parser("pf", help="bootstrap particle filter")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--particles", required=True, type=int)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--scheme", choices=("systematic", "multinomial"), default="systematic")
    p.add_argument("--lag", type=int, default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("forget", help="filter forgetting curve from two priors")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--prior-a", required=True)
    p.add_argument("--prior-b", required=True)
    p.add_argument("--out", required=True)
    return parser


def _summary(payload: dict) -> None:
    print(json.dumps(payload))


def _gaussian_row(t: int, mean: np.ndarray, cov: np.ndarray) -> tuple:
    return (t, *mean, *cov.ravel())


def _gaussian_header(d_x: int) -> list[str]:
    header = ["t"] + [f"m{i}" for i in range(1, d_x + 1)]
    header += [f"P{i}{j}" for i in range(1, d_x + 1) for j in range(1, d_x + 1)]
    return header


def _parse_prior(text: str, flag: str) -> np.ndarray:
    try:
        return np.array([float(cell) for cell in text.split(",")])
    except ValueError:
        raise _UsageError(f"{flag} must be comma-separated numbers, got {text!r}") from None


def _cmd_simulate(args) -> int:
    model = parse_model(args.model)
    if args.T < 1:
        raise _UsageError("--T must be at least 1")
    rng = SeededGenerator(args.seed)
    if isinstance(model, DiscreteHMM):
        _, obs = simulate_hmm(model, args.T, rng)
    else:
        _, obs = simulate_lgssm(model, args.T, rng)
    write_series(args.out, obs)
    _summary(
        {
            "command": "simulate",
            "T": args.T,
            "seed": args.seed,
            "kind": obs.kind,
            "out": args.out,
        }
    )
    return 0


def _cmd_filter(args) -> int:
    model = parse_model(args.model)
    obs = read_series(args.data)
    if isinstance(model, DiscreteHMM):
        result = forward_filter(model, obs)
        if args.out:
            header = ["t"] + [f"p{i}" for i in range(1, model.K + 1)]
            rows = [(t + 1, *result.filtered[t]) for t in range(len(obs))]
            write_table(args.out, header, rows)
        log_likelihood = result.log_likelihood
    else:
        result = kalman_filter(model, obs)
        if args.out:
            rows = [
                _gaussian_row(t + 1, result.filtered_means[t], result.filtered_covs[t])
                for t in range(len(obs))
            ]
            write_table(args.out, _gaussian_header(model.d_x), rows)
        log_likelihood = result.log_likelihood
    _summary({"command": "filter", "log_likelihood": log_likelihood, "out": args.out})
    return 0


def _cmd_smooth(args) -> int:
    model = parse_model(args.model)
    obs = read_series(args.data)
    if isinstance(model, DiscreteHMM):
        forward = forward_filter(model, obs)
        smooth = backward_smooth(model, obs, forward)
        if args.out:
            header = ["t"] + [f"p{i}" for i in range(1, model.K + 1)]
            rows = [(t + 1, *smooth.smoothed[t]) for t in range(len(obs))]
            write_table(args.out, header, rows)
        log_likelihood = forward.log_likelihood
    else:
        forward = kalman_filter(model, obs)
        smooth = rts_smoother(model, forward)
        if args.out:
            rows = [
                _gaussian_row(t + 1, smooth.smoothed_means[t], smooth.smoothed_covs[t])
                for t in range(len(obs))
            ]
            write_table(args.out, _gaussian_header(model.d_x), rows)
        log_likelihood = forward.log_likelihood
    _summary({"command": "smooth", "log_likelihood": log_likelihood, "out": args.out})
    return 0


def _cmd_predict(args) -> int:
    model = parse_model(args.model)
    obs = read_series(args.data)
    if args.k < 1:
        raise _UsageError("--k must be at least 1")
    T = len(obs)
    if isinstance(model, DiscreteHMM):
        forward = forward_filter(model, obs)
        ahead = predict_states(model, forward.filtered[-1], args.k)
        header = ["t"] + [f"p{i}" for i in range(1, model.K + 1)]
        rows = [(T + j + 1, *ahead[j]) for j in range(args.k)]
        log_likelihood = forward.log_likelihood
    else:
        forward = kalman_filter(model, obs)
        ahead = kalman_predict(
            model, forward.filtered_means[-1], forward.filtered_covs[-1], args.k
        )
        header = _gaussian_header(model.d_x)
        rows = [_gaussian_row(T + j + 1, m, p) for j, (m, p) in enumerate(ahead)]
        log_likelihood = forward.log_likelihood
    write_table(args.out, header, rows)
    _summary(
        {
            "command": "predict",
            "log_likelihood": log_likelihood,
            "k": args.k,
            "out": args.out,
        }
    )
    return 0


def _cmd_loglik(args) -> int:
    model = parse_model(args.model)
    obs = read_series(args.data)
    if isinstance(model, DiscreteHMM):
        forward = forward_filter(model, obs)
        increments = forward.log_normalizers
        log_likelihood = forward.log_likelihood
    else:
        forward = kalman_filter(model, obs)
        increments = np.array(
            [
                gaussian_logpdf(
                    obs.values[t],
                    model.C @ forward.predicted_means[t],
                    model.C @ forward.predicted_covs[t] @ model.C.T + model.R,
                )
                for t in range(len(obs))
            ]
        )
        log_likelihood = forward.log_likelihood
    if args.out:
        rows = [(t + 1, increments[t]) for t in range(len(obs))]
        write_table(args.out, ["t", "log_increment"], rows)
    _summary(
        {
            "command": "loglik",
            "log_likelihood": log_likelihood,
            "T": len(obs),
            "out": args.out,
        }
    )
    return 0


def _cmd_fit(args) -> int:
    model = parse_model(args.model)
    obs = read_series(args.data)
    method = args.method
    if method is None:
        method = "em" if isinstance(model, DiscreteHMM) else "mle"
    if args.tol <= 0:
        raise _UsageError("--tol must be positive")
    if args.max_iter < 1:
        raise _UsageError("--max-iter must be at least 1")
    if method == "em":
        if not isinstance(model, DiscreteHMM):
            raise _UsageError(
                "EM fitting covers discrete models only; use --method mle"
            )
        fitted, trace = fit_em(model, obs, tol=args.tol, max_iter=args.max_iter)
        log_likelihood = forward_filter(fitted, obs).log_likelihood
        iterations = len(trace)
        converged = len(trace) <= args.max_iter
    else:
        fitted, report = fit_mle(model, obs, tol=args.tol, max_iter=args.max_iter)
        log_likelihood = -report.final_value
        iterations = report.iterations
        converged = report.converged
    write_model(args.out, fitted)
    _summary(
        {
            "command": "fit",
            "method": method,
            "log_likelihood": log_likelihood,
            "iterations": iterations,
            "converged": converged,
            "out": args.out,
        }
    )
    return 0


def _cmd_pf(args) -> int:
    model = parse_model(args.model)
    obs = read_series(args.data)
    if not isinstance(model, LinearGaussianModel):
        raise ModelValidationError(
            "pf requires a linear_gaussian model document; generic models are "
            "reachable through the library interface only"
        )
    if args.particles < 1:
        raise _UsageError("--particles must be at least 1")
    if not 0.0 < args.threshold <= 1.0:
        raise _UsageError("--threshold must lie in (0, 1]")
    if args.lag is not None and args.lag < 0:
        raise _UsageError("--lag must be non-negative")
    generic = lgssm_as_generic(model)
    result = bootstrap_filter(
        generic,
        obs,
        args.particles,
        SeededGenerator(args.seed),
        resample_threshold=args.threshold,
        scheme=args.scheme,
    )
    if args.lag is None:
        header = ["t"] + [f"m{i}" for i in range(1, model.d_x + 1)] + ["ess"]
        rows = [
            (t + 1, *result.filtered_means[t], result.ess_trace[t])
            for t in range(len(obs))
        ]
    else:
        smoothed = fixed_lag_smoother(
            generic,
            obs,
            args.particles,
            args.lag,
            SeededGenerator(args.seed),
            resample_threshold=args.threshold,
            scheme=args.scheme,
        )
        header = ["t"] + [f"m{i}" for i in range(1, model.d_x + 1)]
        rows = [(t + 1, *smoothed[t]) for t in range(len(obs))]
    write_table(args.out, header, rows)
    _summary(
        {
            "command": "pf",
            "log_likelihood": result.log_likelihood_estimate,
            "particles": args.particles,
            "seed": args.seed,
            "resample_count": len(result.resample_events),
            "lag": args.lag,
            "out": args.out,
        }
    )
    return 0


def _cmd_forget(args) -> int:
    model = parse_model(args.model)
    obs = read_series(args.data)
    if not isinstance(model, DiscreteHMM):
        raise ModelValidationError("forget requires a discrete_hmm model document")
    prior_a = _parse_prior(args.prior_a, "--prior-a")
    prior_b = _parse_prior(args.prior_b, "--prior-b")
    K = model.initial.shape[0]
    for flag, prior in (("--prior-a", prior_a), ("--prior-b", prior_b)):
        if prior.shape[0] != K:
            raise _UsageError(f"{flag} must have {K} entries, got {prior.shape[0]}")
    curve = forgetting_curve(model, obs, prior_a, prior_b)
    rows = [(t + 1, curve.tv[t]) for t in range(curve.tv.shape[0])]
    write_table(args.out, ["t", "tv"], rows)
    _summary(
        {
            "command": "forget",
            "rho_hat": curve.rho_hat,
            "fit_window": list(curve.fit_window),
            "dobrushin": dobrushin_coefficient(model.transition),
            "out": args.out,
        }
    )
    return 0


_DISPATCH = {
    "simulate": _cmd_simulate,
    "filter": _cmd_filter,
    "smooth": _cmd_smooth,
    "predict": _cmd_predict,
    "loglik": _cmd_loglik,
    "fit": _cmd_fit,
    "pf": _cmd_pf,
    "forget": _cmd_forget,
}


def run_command(argv: list[str]) -> int:
    """Run one subcommand; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _DISPATCH[args.command](args)
    except SystemExit as exc:  # --help
        code = exc.code
        return int(code) if code is not None else 0
    except _UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 1
    except NumericalError as err:
        print(f"numerical error: {err}", file=sys.stderr)
        return 3
    except (DataFormatError, ModelValidationError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except ValueError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
