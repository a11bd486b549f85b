"""Choi matrices, Kraus operators and channel verdicts.

A map ``Phi: M_{d_in} -> M_{d_out}`` is stored through its Choi matrix
``S = [Phi(E_kj)]_{k,j}``, a ``d_in x d_in`` array of ``d_out x d_out``
blocks, i.e. an operator on input (x) output with the block index on the
input side.  With column-stacking ``vec`` this layout gives
``S = sum_i vec(V_i) vec(V_i)^*`` for ``Phi(rho) = sum_i V_i rho V_i^*``.

Consequences of the layout:

* tracing out the output (inner) factor gives ``(sum V_i^* V_i)^T``, so the
  map is trace preserving iff that partial trace is ``I_{d_in}``;
* tracing out the input (block) factor gives ``Phi(I) = sum V_i V_i^*``, so
  the map is unital iff that partial trace is ``I_{d_out}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from psdkit import matcore, positivity
from psdkit.errors import DomainError, NotPSDError
from psdkit.positivity import PositivityVerdict


@dataclass
class KrausSet:
    d_in: int
    d_out: int
    operators: list[np.ndarray] = field(default_factory=list)

    def __post_init__(self):
        self.operators = [matcore.as_matrix(V) for V in self.operators]
        for V in self.operators:
            if V.shape != (self.d_out, self.d_in):
                raise DomainError(f"Kraus operator shape {V.shape}, expected {(self.d_out, self.d_in)}")

    def __len__(self):
        return len(self.operators)


@dataclass
class ChoiMatrix:
    d_in: int
    d_out: int
    matrix: np.ndarray

    def __post_init__(self):
        self.matrix = matcore.as_matrix(self.matrix)
        n = self.d_in * self.d_out
        if self.matrix.shape != (n, n):
            raise DomainError(f"Choi matrix shape {self.matrix.shape}, expected {(n, n)}")

    def block(self, k: int, j: int) -> np.ndarray:
        m = self.d_out
        return self.matrix[k * m:(k + 1) * m, j * m:(j + 1) * m]


def _unit(d: int, k: int, j: int) -> np.ndarray:
    E = np.zeros((d, d), dtype=complex)
    E[k, j] = 1.0
    return E


def choi_from_kraus(K: KrausSet) -> ChoiMatrix:
    """Choi matrix assembled block by block from ``Phi(E_kj)``.

    Cross-checked against the outer-product form by :func:`choi_from_kraus_vec`.
    """
    S = np.zeros((K.d_in * K.d_out,) * 2, dtype=complex)
    m = K.d_out
    for k in range(K.d_in):
        for j in range(K.d_in):
            S[k * m:(k + 1) * m, j * m:(j + 1) * m] = apply_kraus(K, _unit(K.d_in, k, j))
    return ChoiMatrix(K.d_in, K.d_out, S)


def choi_from_kraus_vec(K: KrausSet) -> ChoiMatrix:
    """Choi matrix as ``sum_i vec(V_i) vec(V_i)^*``."""
    S = np.zeros((K.d_in * K.d_out,) * 2, dtype=complex)
    for V in K.operators:
        v = matcore.vec(V)
        S += v @ v.conj().T
    return ChoiMatrix(K.d_in, K.d_out, S)


def apply_kraus(K: KrausSet, rho) -> np.ndarray:
    A = matcore.as_matrix(rho)
    if A.shape != (K.d_in, K.d_in):
        raise DomainError(f"input shape {A.shape}, expected {(K.d_in, K.d_in)}")
    out = np.zeros((K.d_out, K.d_out), dtype=complex)
    for V in K.operators:
        out += V @ A @ V.conj().T
    return out


def apply_choi(S: ChoiMatrix, rho) -> np.ndarray:
    """Channel action read directly off the Choi matrix: ``sum_kj rho_kj Phi(E_kj)``."""
    A = matcore.as_matrix(rho)
    R = S.matrix.reshape(S.d_in, S.d_out, S.d_in, S.d_out)
    return np.einsum("kj,kpjq->pq", A, R)


def kraus_from_choi(S: ChoiMatrix, tol: float = matcore.DEFAULT_TOL,
                    method: str = "cholesky") -> KrausSet:
    """Kraus operators from the columns of a square root ``T`` of ``S = T T^*``.

    ``method="cholesky"`` uses the semidefinite Cholesky factor, whose
    lower-triangular shape makes the early operators sparse;
    ``method="spectral"`` uses ``V sqrt(w)``.  Columns with norm at most
    ``tol * |S|^(1/2)`` are dropped.
    """
    A = S.matrix
    if method == "cholesky":
        T = matcore.psd_cholesky(A, tol)
    elif method == "spectral":
        w, V = matcore.herm_eig(A, tol)
        scale = max(1.0, float(np.max(np.abs(w), initial=0.0)))
        if w.size and w[-1] < -tol * scale:
            raise NotPSDError(f"Choi matrix not positive: eigenvalue {w[-1]:.3e}", witness=float(w[-1]))
        # eigenvalues at rounding level would survive the column cutoff after the root
        T = V * np.sqrt(np.where(w > tol * scale, w, 0.0))
    else:
        raise DomainError(f"unknown square-root method {method!r}")
    cutoff = tol * np.sqrt(matcore.opnorm(A))
    ops = [
        matcore.unvec(T[:, i], S.d_out, S.d_in)
        for i in range(T.shape[1])
        if np.linalg.norm(T[:, i]) > cutoff
    ]
    return KrausSet(S.d_in, S.d_out, ops)


def is_cp(S: ChoiMatrix, tol: float = matcore.DEFAULT_TOL) -> PositivityVerdict:
    return positivity.check_p2_eigen(S.matrix, tol)


def _close_to_identity(M: np.ndarray, tol: float) -> bool:
    return float(np.max(np.abs(M - np.eye(M.shape[0])), initial=0.0)) <= tol


def is_tp(S: ChoiMatrix, tol: float = 1e-9) -> bool:
    return _close_to_identity(matcore.partial_trace(S.matrix, S.d_in, S.d_out, "second"), tol)


def is_unital(S: ChoiMatrix, tol: float = 1e-9) -> bool:
    return _close_to_identity(matcore.partial_trace(S.matrix, S.d_in, S.d_out, "first"), tol)


def kraus_is_tp(K: KrausSet, tol: float = 1e-9) -> bool:
    total = sum((V.conj().T @ V for V in K.operators), np.zeros((K.d_in, K.d_in), complex))
    return _close_to_identity(total, tol)


def kraus_is_unital(K: KrausSet, tol: float = 1e-9) -> bool:
    total = sum((V @ V.conj().T for V in K.operators), np.zeros((K.d_out, K.d_out), complex))
    return _close_to_identity(total, tol)


def verdicts(S: ChoiMatrix, tol: float = matcore.DEFAULT_TOL) -> dict:
    cp = is_cp(S, tol)
    return {
        "d_in": S.d_in,
        "d_out": S.d_out,
        "cp": cp.to_dict(),
        "tp": is_tp(S, max(tol, 1e-9)),
        "unital": is_unital(S, max(tol, 1e-9)),
    }


def random_kraus(d_in: int, d_out: int, r: int, rng=None, kind: str = "cp") -> KrausSet:
    """Random Kraus set with ``r`` operators.

    ``kind`` is ``"cp"`` (no normalization), ``"tp"`` (trace preserving, via a
    random isometry) or ``"unital"`` (mixture of unitaries, ``d_in == d_out``).
    """
    rng = np.random.default_rng(rng)

    def gauss(*shape):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    if kind == "cp":
        ops = [gauss(d_out, d_in) for _ in range(r)]
    elif kind == "tp":
        if r * d_out < d_in:
            raise DomainError("a trace-preserving map needs r * d_out >= d_in")
        Q, _ = np.linalg.qr(gauss(r * d_out, d_in))
        ops = [Q[i * d_out:(i + 1) * d_out] for i in range(r)]
    elif kind == "unital":
        if d_in != d_out:
            raise DomainError("unital random channels need d_in == d_out")
        p = rng.dirichlet(np.ones(r))
        ops = [np.sqrt(pi) * np.linalg.qr(gauss(d_in, d_in))[0] for pi in p]
    else:
        raise DomainError(f"unknown kind {kind!r}")
    return KrausSet(d_in, d_out, ops)
