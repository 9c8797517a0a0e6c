"""JSON scenario files.

Layout (all fields required except ``label``)::

    {
      "dim_a": 2,
      "h_s":  [[[re, im], [re, im]], [[re, im], [re, im]]],   # 2 x 2
      "h_a":  [...],                                          # dim_a x dim_a
      "v":    [...],                                          # 2 dim_a x 2 dim_a
      "q_basis": [[[re, im], [re, im]], [[re, im], [re, im]]],  # |q0>, |q1>
      "omega": [[re, im], ...],                               # dim_a
      "tau": 1.5707963267948966,
      "hbar": 1.0,
      "label": "optional free text"
    }

Matrices are nested row-major arrays. Floats are written with ``repr``
(shortest round-trip form), so parse -> serialize is lossless.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .linalg import InvalidOperatorError
from .process import MeasurementProcess

FIELDS = ("dim_a", "h_s", "h_a", "v", "q_basis", "omega", "tau", "hbar")
OPTIONAL_FIELDS = ("label",)


class ScenarioError(ValueError):
    """A scenario document fails the schema or the process invariants."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


def _real(x, path: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ScenarioError(path, f"expected a number, got {type(x).__name__}")
    if not math.isfinite(x):
        raise ScenarioError(path, "number is not finite")
    return float(x)


def _complex(x, path: str) -> complex:
    if not isinstance(x, list) or len(x) != 2:
        raise ScenarioError(path, "complex numbers are [re, im] pairs")
    return complex(_real(x[0], f"{path}[0]"), _real(x[1], f"{path}[1]"))


def _vector(x, path: str, length: int) -> np.ndarray:
    if not isinstance(x, list):
        raise ScenarioError(path, "expected an array of [re, im] pairs")
    if len(x) != length:
        raise ScenarioError(path, f"expected length {length}, got {len(x)}")
    return np.array([_complex(c, f"{path}[{i}]") for i, c in enumerate(x)], dtype=complex)


def _matrix(x, path: str, n: int) -> np.ndarray:
    if not isinstance(x, list):
        raise ScenarioError(path, "expected a nested row-major array")
    if len(x) != n:
        raise ScenarioError(path, f"expected {n} rows, got {len(x)}")
    return np.array([_vector(row, f"{path}[{i}]", n) for i, row in enumerate(x)])


def encode_complex(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def encode_vector(v) -> list:
    return [encode_complex(z) for z in np.asarray(v, dtype=complex)]


def encode_matrix(m) -> list:
    return [encode_vector(row) for row in np.asarray(m, dtype=complex)]


def to_dict(p: MeasurementProcess, label: str | None = None) -> dict:
    doc = {
        "dim_a": p.dim_a,
        "h_s": encode_matrix(p.h_s),
        "h_a": encode_matrix(p.h_a),
        "v": encode_matrix(p.v),
        "q_basis": [encode_vector(q) for q in p.q_basis],
        "omega": encode_vector(p.omega),
        "tau": p.tau,
        "hbar": p.hbar,
    }
    if label is not None:
        doc["label"] = label
    return doc


def from_dict(doc) -> MeasurementProcess:
    if not isinstance(doc, dict):
        raise ScenarioError("", "scenario must be a JSON object")
    missing = [f for f in FIELDS if f not in doc]
    if missing:
        raise ScenarioError(missing[0], "required field is missing")
    extra = sorted(set(doc) - set(FIELDS) - set(OPTIONAL_FIELDS))
    if extra:
        raise ScenarioError(extra[0], "unknown field")
    dim_a = doc["dim_a"]
    if isinstance(dim_a, bool) or not isinstance(dim_a, int) or dim_a < 1:
        raise ScenarioError("dim_a", "must be a positive integer")
    h_s = _matrix(doc["h_s"], "h_s", 2)
    h_a = _matrix(doc["h_a"], "h_a", dim_a)
    v = _matrix(doc["v"], "v", 2 * dim_a)
    qb = doc["q_basis"]
    if not isinstance(qb, list) or len(qb) != 2:
        raise ScenarioError("q_basis", "expected two vectors [|q0>, |q1>]")
    q_basis = tuple(_vector(q, f"q_basis[{j}]", 2) for j, q in enumerate(qb))
    omega = _vector(doc["omega"], "omega", dim_a)
    tau = _real(doc["tau"], "tau")
    hbar = _real(doc["hbar"], "hbar")

    # Field-level semantic checks so diagnostics can name the offending field.
    for name, vec in (("q_basis[0]", q_basis[0]), ("q_basis[1]", q_basis[1]), ("omega", omega)):
        norm = float(np.linalg.norm(vec))
        if abs(norm - 1.0) > 1e-10:
            label = "omega norm" if name == "omega" else f"{name} norm"
            raise ScenarioError(name, f"{label} is {norm!r}, expected 1")
    if tau < 0:
        raise ScenarioError("tau", "must be >= 0")
    if hbar <= 0:
        raise ScenarioError("hbar", "must be > 0")
    try:
        return MeasurementProcess(dim_a, h_s, h_a, v, q_basis, omega, tau, hbar)
    except (InvalidOperatorError, ValueError) as exc:
        raise ScenarioError("", str(exc)) from exc


def dumps(p: MeasurementProcess, label: str | None = None) -> str:
    return json.dumps(to_dict(p, label), indent=None, separators=(", ", ": ")) + "\n"


def loads(text: str) -> MeasurementProcess:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError("", f"invalid JSON: {exc}") from exc
    return from_dict(doc)


def load(path) -> MeasurementProcess:
    return loads(Path(path).read_text(encoding="utf-8"))


def dump(p: MeasurementProcess, path, label: str | None = None) -> None:
    Path(path).write_text(dumps(p, label), encoding="utf-8")
