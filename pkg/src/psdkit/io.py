"""File formats shared by the library and the command line.

Matrix JSON::

    {"rows": 2, "cols": 2, "data": [[[1.0, 0.0], [0.5, 0.0]],
                                     [[0.5, 0.0], [1.0, 0.0]]]}

Each entry is a ``[re, im]`` pair; Python's shortest-repr float formatting
makes the round trip bit exact.  Matrix CSV has one row per line with
``re+imj`` tokens.  Parameter sets and Kraus sets embed matrix objects and use
1-based indices for the contractions.
"""

from __future__ import annotations

import csv
import io as _io
import json
from pathlib import Path
from typing import Any

import numpy as np

from psdkit import matcore
from psdkit.channel import KrausSet
from psdkit.errors import DomainError
from psdkit.schur import SchurParameters


def matrix_to_obj(M) -> dict:
    A = matcore.as_matrix(M)
    return {
        "rows": A.shape[0],
        "cols": A.shape[1],
        "data": [[[float(z.real), float(z.imag)] for z in row] for row in A],
    }


def matrix_from_obj(obj: Any) -> np.ndarray:
    """Read a matrix object; plain nested lists of reals are accepted too."""
    if isinstance(obj, dict):
        try:
            rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
        except KeyError as exc:
            raise DomainError(f"matrix object missing key {exc}") from None
        entries = [[_entry(z) for z in row] for row in data]
        if len(entries) != rows or any(len(row) != cols for row in entries):
            raise DomainError(f"matrix data does not match header {(rows, cols)}")
        A = np.array(entries, dtype=complex).reshape(rows, cols)
        if A.shape != (rows, cols):
            raise DomainError(f"matrix data has shape {A.shape}, header says {(rows, cols)}")
        return A
    if isinstance(obj, list):
        return matcore.as_matrix([[_entry(z) for z in row] for row in obj])
    raise DomainError("expected a matrix object")


def _entry(z) -> complex:
    if isinstance(z, (list, tuple)):
        if len(z) != 2:
            raise DomainError(f"matrix entry must be [re, im], got {z!r}")
        return complex(float(z[0]), float(z[1]))
    if isinstance(z, (int, float)):
        return complex(z)
    raise DomainError(f"cannot read matrix entry {z!r}")


def format_complex(z: complex) -> str:
    re, im = repr(float(z.real)), repr(float(z.imag))
    sign = "" if im.startswith("-") else "+"
    return f"{re}{sign}{im}j"


def matrix_to_csv(M) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in matcore.as_matrix(M):
        writer.writerow(format_complex(z) for z in row)
    return buf.getvalue()


def matrix_from_csv(text: str) -> np.ndarray:
    rows = [r for r in csv.reader(_io.StringIO(text)) if r]
    try:
        return matcore.as_matrix([[complex(tok.strip().replace(" ", "")) for tok in r] for r in rows])
    except ValueError as exc:
        raise DomainError(f"bad CSV matrix: {exc}") from None


def params_to_obj(p: SchurParameters) -> dict:
    return {
        "d": p.d,
        "block": p.block,
        "L": [matrix_to_obj(L) for L in p.roots],
        "gamma": [
            {"k": k + 1, "j": j + 1, "value": matrix_to_obj(g)}
            for (k, j), g in sorted(p.gammas.items())
        ],
    }


def params_from_obj(obj: dict) -> SchurParameters:
    try:
        d, block = int(obj["d"]), int(obj.get("block", 1))
        roots = [matrix_from_obj(L) for L in obj["L"]]
        gammas = {(int(g["k"]) - 1, int(g["j"]) - 1): matrix_from_obj(g["value"])
                  for g in obj.get("gamma", [])}
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed parameter set: {exc}") from None
    return SchurParameters(d, block, roots, gammas)


def kraus_to_obj(K: KrausSet) -> dict:
    return {"d_in": K.d_in, "d_out": K.d_out, "ops": [matrix_to_obj(V) for V in K.operators]}


def kraus_from_obj(obj: dict) -> KrausSet:
    try:
        return KrausSet(int(obj["d_in"]), int(obj["d_out"]), [matrix_from_obj(V) for V in obj["ops"]])
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed Kraus set: {exc}") from None


def read_json(path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path}: invalid JSON ({exc})") from None


def read_matrix(path) -> np.ndarray:
    """Matrix from a ``.csv`` file or a JSON matrix object."""
    p = Path(path)
    if p.suffix.lower() == ".csv":
        return matrix_from_csv(p.read_text())
    return matrix_from_obj(read_json(p))


def dumps(obj: Any) -> str:
    return json.dumps(_plain(obj), indent=2, sort_keys=True, allow_nan=True)


def _plain(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj
