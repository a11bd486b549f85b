"""Six equivalent positivity tests for Hermitian matrices, run as independent oracles.

Each ``check_*`` function returns a :class:`PositivityVerdict`.  "Non-negative"
always means ``>= -tol * scale`` where the scale is chosen per method so the
threshold is dimensionally sensible:

* P1 quadratic form, P2 eigenvalues, P6 square root: ``max(1, |P|)``
* P3 Cholesky: ``|P|`` (see :func:`psdkit.matcore.psd_cholesky`)
* P4 principal minors of size ``s``: ``max(1, |P|)**s``
* P5 characteristic coefficient ``b_i``: ``binom(n, i) * max(1, |P|)**i``
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Any

import numpy as np

from psdkit import matcore
from psdkit.errors import CapacityError, ConsistencyError, NotPSDError

METHODS = ("p1", "p2", "p3", "p4", "p5", "p6")
DECIDABLE = ("p2", "p3", "p4", "p5", "p6")
MAX_MINOR_DIM = 16


@dataclass(frozen=True)
class PositivityVerdict:
    is_psd: bool
    method: str
    witness: Any = None
    note: str = ""

    def __post_init__(self):
        if self.is_psd != (self.witness is None):
            raise ValueError("witness must be present exactly when is_psd is False")

    def to_dict(self) -> dict:
        w = self.witness
        if isinstance(w, np.ndarray):
            w = [[c.real, c.imag] for c in np.asarray(w, dtype=complex).ravel()]
        elif isinstance(w, tuple):
            w = list(w)
        out = {"method": self.method, "is_psd": self.is_psd, "witness": w}
        if self.note:
            out["note"] = self.note
        return out


def _scale(P) -> float:
    return max(1.0, matcore.opnorm(P))


def check_p1_quadratic_form(P, samples: int = 1000, tol: float = matcore.DEFAULT_TOL,
                            rng=None) -> PositivityVerdict:
    """Monte-Carlo test of ``z^* P z >= 0`` over random unit vectors.

    A negative value is a disproof and the offending ``z`` is the witness.
    Passing is only evidence, never a proof; the verdict's note says so.
    """
    A = matcore.require_hermitian(P, tol)
    rng = np.random.default_rng(rng)
    n = A.shape[0]
    Z = rng.standard_normal((samples, n)) + 1j * rng.standard_normal((samples, n))
    Z /= np.linalg.norm(Z, axis=1, keepdims=True)
    values = np.einsum("si,ij,sj->s", Z.conj(), A, Z).real
    worst = int(np.argmin(values)) if samples else None
    if samples and values[worst] < -tol * _scale(A):
        return PositivityVerdict(False, "p1", Z[worst].copy(), note="necessary-only")
    return PositivityVerdict(True, "p1", note="necessary-only")


def check_p2_eigen(P, tol: float = matcore.DEFAULT_TOL) -> PositivityVerdict:
    w, _ = matcore.herm_eig(P, tol)
    if w.size and w[-1] < -tol * _scale(P):
        return PositivityVerdict(False, "p2", float(w[-1]))
    return PositivityVerdict(True, "p2")


def check_p3_cholesky(P, tol: float = matcore.DEFAULT_TOL) -> PositivityVerdict:
    try:
        matcore.psd_cholesky(P, tol)
    except NotPSDError as exc:
        return PositivityVerdict(False, "p3", exc.index)
    return PositivityVerdict(True, "p3")


def check_p4_minors(P, tol: float = matcore.DEFAULT_TOL) -> PositivityVerdict:
    """Enumerate all ``2^n - 1`` principal minors; refuses ``n > 16``."""
    A = matcore.require_hermitian(P, tol)
    n = A.shape[0]
    if n > MAX_MINOR_DIM:
        raise CapacityError(f"principal-minor enumeration limited to n <= {MAX_MINOR_DIM}, got {n}")
    scale = _scale(A)
    for size in range(1, n + 1):
        bound = -tol * scale**size
        for idx in itertools.combinations(range(n), size):
            minor = matcore.det_lu(A[np.ix_(idx, idx)]).real
            if minor < bound:
                return PositivityVerdict(False, "p4", tuple(i + 1 for i in idx))
    return PositivityVerdict(True, "p4")


def check_p5_charpoly(P, tol: float = matcore.DEFAULT_TOL) -> PositivityVerdict:
    A = matcore.require_hermitian(P, tol)
    n = A.shape[0]
    b = matcore.charpoly_coeffs(A)
    scale = _scale(A)
    for i in range(1, n + 1):
        if b[i - 1] < -tol * comb(n, i) * scale**i:
            return PositivityVerdict(False, "p5", i)
    return PositivityVerdict(True, "p5")


def check_p6_sqrt(P, tol: float = matcore.DEFAULT_TOL) -> PositivityVerdict:
    A = matcore.require_hermitian(P, tol)
    try:
        H = matcore.matrix_sqrt_psd(A, tol)
    except NotPSDError as exc:
        return PositivityVerdict(False, "p6", exc.witness)
    residual = matcore.opnorm(H @ H - A)
    if residual > 1e-8 * _scale(A):
        return PositivityVerdict(False, "p6", residual)
    return PositivityVerdict(True, "p6")


_CHECKS = {
    "p2": check_p2_eigen,
    "p3": check_p3_cholesky,
    "p4": check_p4_minors,
    "p5": check_p5_charpoly,
    "p6": check_p6_sqrt,
}


def check(P, method: str = "p2", tol: float = matcore.DEFAULT_TOL) -> PositivityVerdict:
    if method == "p1":
        return check_p1_quadratic_form(P, tol=tol)
    try:
        return _CHECKS[method](P, tol)
    except KeyError:
        raise ValueError(f"unknown method {method!r}") from None


def consensus(P, tol: float = matcore.DEFAULT_TOL, include_p1: bool = False,
              strict: bool = True, rng=None) -> dict[str, PositivityVerdict]:
    """Run P2-P6 (optionally P1) and return ``{method: verdict}``.

    With ``strict`` a disagreement among the decidable methods raises
    :class:`ConsistencyError`.  P1 can only disagree by passing an indefinite
    matrix, which is not an inconsistency, so it is never part of the vote.
    """
    methods = list(DECIDABLE)
    if matcore.require_hermitian(P, tol).shape[0] > MAX_MINOR_DIM:
        methods.remove("p4")
    verdicts = {m: _CHECKS[m](P, tol) for m in methods}
    if include_p1:
        verdicts = {"p1": check_p1_quadratic_form(P, tol=tol, rng=rng), **verdicts}
    outcomes = {verdicts[m].is_psd for m in methods}
    if strict and len(outcomes) > 1:
        detail = ", ".join(f"{m}={verdicts[m].is_psd}" for m in methods)
        raise ConsistencyError(f"positivity oracles disagree: {detail}")
    return verdicts
