"""Model documents and observation series files.

Models are JSON objects with a "type" discriminator; series are CSV files
with header "t,y" (symbolic) or "t,y1,...,yd" (real) and a gap-free t
column starting at 1.  All writers emit floats with 17 significant digits
so values round-trip exactly, and write through a temp file renamed into
place so no partial output survives an error.
"""

from __future__ import annotations

import csv
import difflib
import json
import math
import os
import tempfile

import numpy as np

from .errors import DataFormatError, ModelValidationError
from .models import (
    DiscreteHMM,
    LinearGaussianModel,
    ObservationSeries,
    validate_model,
)

__all__ = ["parse_model", "read_series", "write_series", "write_model", "write_table"]

ROW_SUM_TOL = 1e-12

_HMM_KEYS = ("initial", "transition", "emission")
_LG_KEYS = ("A", "C", "Q", "R", "mu0", "sigma0")


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _field_array(doc: dict, key: str, ndim: int) -> np.ndarray:
    if key not in doc:
        raise DataFormatError(f'missing field "{key}"')
    try:
        arr = np.asarray(doc[key], dtype=float)
    except (TypeError, ValueError) as err:
        raise DataFormatError(f'field "{key}" is not a numeric array: {err}') from None
    if arr.ndim != ndim:
        raise DataFormatError(
            f'field "{key}" must be {ndim}-dimensional, got {arr.ndim} dimensions'
        )
    if not np.all(np.isfinite(arr)):
        raise DataFormatError(f'field "{key}" contains non-finite entries')
    return arr


def _normalize_rows(mat: np.ndarray, key: str) -> np.ndarray:
    # Rows within tolerance of summing to 1 are renormalized exactly once;
    # rows beyond it are rejected as real errors, not rounding.
    out = mat.copy()
    rows = out if out.ndim == 2 else out[None, :]
    for i in range(rows.shape[0]):
        where = f"{key}[{i}]" if mat.ndim == 2 else key
        if np.any(rows[i] < 0):
            raise ModelValidationError(f'"{where}" has negative entries')
        s = rows[i].sum()
        if abs(s - 1.0) > ROW_SUM_TOL:
            raise ModelValidationError(
                f'"{where}" sums to {s:.17g}, off by {s - 1.0:.3g}'
            )
        rows[i] = rows[i] / s
    return out


def parse_model(path: str):
    """Load and validate a model document.

    Probability rows within 1e-12 of summing to 1 are renormalized; rows
    further off are rejected with the offending field named.  Unknown
    top-level keys are rejected, with a suggestion when one is close to a
    known key.
    """
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as err:
            raise DataFormatError(f"{path} is not valid JSON: {err}") from None
    if not isinstance(doc, dict):
        raise DataFormatError("model document must be a JSON object")
    kind = doc.get("type")
    if kind is None:
        raise DataFormatError('missing field "type"')
    if kind == "discrete_hmm":
        allowed = _HMM_KEYS
    elif kind == "linear_gaussian":
        allowed = _LG_KEYS
    else:
        raise DataFormatError(
            f'unknown model type {kind!r}; expected "discrete_hmm" or "linear_gaussian"'
        )
    for key in doc:
        if key != "type" and key not in allowed:
            hint = difflib.get_close_matches(key, allowed, n=1)
            suffix = f'; did you mean "{hint[0]}"?' if hint else ""
            raise DataFormatError(f'unknown key "{key}"{suffix}')

    if kind == "discrete_hmm":
        initial = _normalize_rows(_field_array(doc, "initial", 1), "initial")
        transition = _normalize_rows(_field_array(doc, "transition", 2), "transition")
        emission = _normalize_rows(_field_array(doc, "emission", 2), "emission")
        try:
            model = DiscreteHMM(initial, transition, emission)
        except ModelValidationError as err:
            raise ModelValidationError(f"model document invalid: {err}") from None
    else:
        fields = {key: _field_array(doc, key, 1 if key == "mu0" else 2) for key in _LG_KEYS}
        try:
            model = LinearGaussianModel(
                A=fields["A"],
                C=fields["C"],
                Q=fields["Q"],
                R=fields["R"],
                mu0=fields["mu0"],
                Sigma0=fields["sigma0"],
            )
        except ModelValidationError as err:
            raise ModelValidationError(f"model document invalid: {err}") from None
    violations = validate_model(model)
    if violations:
        raise ModelValidationError("model document invalid: " + "; ".join(violations))
    return model


def read_series(path: str) -> ObservationSeries:
    """Load an observation series, inferring its kind from the header."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataFormatError(f"{path} is empty")
    header = [cell.strip() for cell in rows[0]]
    if header == ["t", "y"]:
        kind = "symbolic"
        width = 2
    elif (
        len(header) >= 2
        and header[0] == "t"
        and header[1:] == [f"y{i}" for i in range(1, len(header))]
    ):
        kind = "real"
        width = len(header)
    else:
        raise DataFormatError(
            f'line 1: header must be "t,y" or "t,y1,...,yd", got {",".join(header)!r}'
        )
    data = [row for row in rows[1:] if row]
    if not data:
        raise DataFormatError(f"{path} has a header but no data rows")

    if kind == "symbolic":
        values = np.empty(len(data), dtype=np.int64)
    else:
        values = np.empty((len(data), width - 1))
    for i, row in enumerate(data):
        line = i + 2
        if len(row) != width:
            raise DataFormatError(
                f"line {line}: expected {width} columns, got {len(row)}"
            )
        try:
            t = int(row[0])
        except ValueError:
            raise DataFormatError(f"line {line}: t must be an integer, got {row[0]!r}") from None
        if t != i + 1:
            raise DataFormatError(f"line {line}: expected t={i + 1}, got t={t}")
        if kind == "symbolic":
            try:
                values[i] = int(row[1])
            except ValueError:
                raise DataFormatError(
                    f"line {line}: y must be an integer symbol, got {row[1]!r}"
                ) from None
        else:
            for j, cell in enumerate(row[1:]):
                try:
                    v = float(cell)
                except ValueError:
                    raise DataFormatError(
                        f"line {line}: y{j + 1} must be a number, got {cell!r}"
                    ) from None
                if not math.isfinite(v):
                    raise DataFormatError(f"line {line}: y{j + 1} must be finite")
                values[i, j] = v
    return ObservationSeries(values, kind=kind)


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_table(path: str, header: list[str], rows) -> None:
    """CSV writer: ints kept as ints, floats at 17 significant digits."""
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, (int, np.integer)):
                cells.append(str(int(cell)))
            else:
                cells.append(_fmt(cell))
        lines.append(",".join(cells))
    _atomic_write(path, "\n".join(lines) + "\n")


def write_series(path: str, obs: ObservationSeries) -> None:
    """Write a series file in the format read_series accepts."""
    if obs.kind == "symbolic":
        header = ["t", "y"]
        rows = [(t + 1, int(y)) for t, y in enumerate(obs.values)]
    else:
        d = obs.values.shape[1]
        header = ["t"] + [f"y{j}" for j in range(1, d + 1)]
        rows = [(t + 1, *obs.values[t]) for t in range(obs.values.shape[0])]
    write_table(path, header, rows)


def write_model(path: str, model) -> None:
    """Write a model document in the format parse_model accepts."""
    if isinstance(model, DiscreteHMM):
        doc = {
            "type": "discrete_hmm",
            "initial": model.initial.tolist(),
            "transition": model.transition.tolist(),
            "emission": model.emission.tolist(),
        }
    elif isinstance(model, LinearGaussianModel):
        doc = {
            "type": "linear_gaussian",
            "A": model.A.tolist(),
            "C": model.C.tolist(),
            "Q": model.Q.tolist(),
            "R": model.R.tolist(),
            "mu0": model.mu0.tolist(),
            "sigma0": model.Sigma0.tolist(),
        }
    else:
        raise ValueError(f"cannot serialize {type(model).__name__}")
    _atomic_write(path, json.dumps(doc, indent=2) + "\n")
