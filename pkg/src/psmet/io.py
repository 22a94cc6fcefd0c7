"""File formats: JSON operators/states, sweep CSV, number rendering.

Operators::

    {"dim": n, "entries": [[[re, im], ...], ...]}

States::

    {"dim": n, "amplitudes": [[re, im], ...]}

Floats are rendered with 17 significant digits so every double round-trips.
"""

from __future__ import annotations

import csv
import json
import math

import numpy as np

from .errors import InputError
from .protocols import SWEEP_HEADER


def fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot render non-finite value {x!r}")
    s = format(float(x), ".17g")
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def _pair(z, where):
    if (not isinstance(z, (list, tuple)) or len(z) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in z)):
        raise InputError(f"{where}: expected [re, im], got {z!r}")
    return complex(z[0], z[1])


def _dim(doc, key):
    if not isinstance(doc, dict) or "dim" not in doc or key not in doc:
        raise InputError(f"expected an object with 'dim' and '{key}'")
    dim = doc["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise InputError(f"'dim' must be a positive integer, got {dim!r}")
    return dim


def operator_from_json(doc) -> np.ndarray:
    dim = _dim(doc, "entries")
    rows = doc["entries"]
    if not isinstance(rows, list) or len(rows) != dim:
        raise InputError(f"'entries' must have {dim} rows")
    out = np.empty((dim, dim), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != dim:
            raise InputError(f"row {i} must have {dim} entries")
        for j, z in enumerate(row):
            out[i, j] = _pair(z, f"entries[{i}][{j}]")
    return out


def state_from_json(doc) -> np.ndarray:
    dim = _dim(doc, "amplitudes")
    amps = doc["amplitudes"]
    if not isinstance(amps, list) or len(amps) != dim:
        raise InputError(f"'amplitudes' must have {dim} entries")
    return np.array([_pair(z, f"amplitudes[{i}]") for i, z in enumerate(amps)], dtype=complex)


def operator_to_json(M) -> dict:
    M = np.asarray(M, dtype=complex)
    return {"dim": M.shape[0],
            "entries": [[[float(z.real), float(z.imag)] for z in row] for row in M]}


def state_to_json(psi) -> dict:
    psi = np.asarray(psi, dtype=complex)
    return {"dim": psi.shape[0], "amplitudes": [[float(z.real), float(z.imag)] for z in psi]}


def _read_json(path):
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON ({exc})") from exc


def load_operator(path) -> np.ndarray:
    return operator_from_json(_read_json(path))


def load_state(path) -> np.ndarray:
    return state_from_json(_read_json(path))


def dumps(obj) -> str:
    """JSON text with floats at 17 significant digits."""
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def parse_grid(text: str) -> np.ndarray:
    """``a:b:n`` gives n evenly spaced points from a to b inclusive; a bare number gives one."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return np.array([float(parts[0])])
        if len(parts) == 3:
            a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
            if n < 1:
                raise InputError(f"grid {text!r} needs at least one point")
            return np.linspace(a, b, n)
    except ValueError as exc:
        raise InputError(f"bad grid {text!r}: {exc}") from exc
    raise InputError(f"grid must look like a:b:n, got {text!r}")


def parse_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise InputError(f"bad number list {text!r}") from exc


def _cell(v):
    return "divergent" if v is None else fmt_float(v)


def write_sweep_csv(rows, fh) -> None:
    """Sweep rows under the fixed header; failed cells read ``divergent``."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for row in rows:
        w.writerow([_cell(v) for v in row.as_tuple()])
