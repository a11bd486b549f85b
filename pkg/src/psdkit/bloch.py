"""Generalized Gell-Mann basis and Bloch-vector coordinates of qudit states.

A state is written ``rho = (I + sum_i beta_i lambda_i) / d`` with traceless
Hermitian ``lambda_i`` normalized by ``Tr(lambda_i lambda_j) = 2 delta_ij``.

The symmetric structure tensor is normalized as

    {lambda_k, lambda_l} = (4/d) delta_kl I + 2 sum_i d_kli lambda_i,
    d_kli = Tr({lambda_k, lambda_l} lambda_i) / 4,

which for ``d = 3`` gives the textbook values (``d_118 = 1/sqrt(3)``).  With
this normalization a state is pure iff ``|beta|^2 = (d^2 - d)/2`` and
``(d - 2) beta = beta cup beta``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from psdkit import matcore
from psdkit.errors import DomainError


@dataclass(frozen=True)
class GellMannBasis:
    d: int
    lambdas: np.ndarray  # shape (d^2 - 1, d, d)

    def __len__(self):
        return len(self.lambdas)


@dataclass(frozen=True)
class BlochVector:
    d: int
    beta: np.ndarray


@lru_cache(maxsize=None)
def _gellmann(d: int) -> np.ndarray:
    def unit(k, j):
        E = np.zeros((d, d), dtype=complex)
        E[k, j] = 1.0
        return E

    pairs = [(k, j) for k in range(d) for j in range(k + 1, d)]
    sym = [unit(k, j) + unit(j, k) for k, j in pairs]
    # f_{j,k} with j > k: (E_{k,j} - E_{j,k}) / i
    antisym = [(unit(k, j) - unit(j, k)) / 1j for k, j in pairs]
    diag = []
    for k in range(2, d + 1):
        h = np.zeros((d, d), dtype=complex)
        h[range(k - 1), range(k - 1)] = 1.0
        h[k - 1, k - 1] = 1.0 - k
        diag.append(np.sqrt(2.0 / (k * (k - 1))) * h)
    out = np.array(sym + antisym + diag)
    out.setflags(write=False)
    return out


def gellmann(d: int) -> GellMannBasis:
    """Generalized Gell-Mann matrices in the fixed order: symmetric, antisymmetric, diagonal.

    Off-diagonal pairs ``(k, j)``, ``k < j``, are taken in lexicographic
    order for both the symmetric and the antisymmetric families, and the
    diagonal family is ``h_2, ..., h_d`` with ``h_k`` proportional to
    ``diag(1, ..., 1, 1-k, 0, ..., 0)``.  For ``d = 2`` this is
    ``(sigma_x, sigma_y, sigma_z)``.
    """
    if d < 2:
        raise DomainError(f"dimension must be at least 2, got {d}")
    return GellMannBasis(d, _gellmann(d))


def to_bloch(rho, basis: GellMannBasis, tol: float = matcore.DEFAULT_TOL) -> BlochVector:
    A = matcore.require_hermitian(rho, tol)
    if A.shape != (basis.d, basis.d):
        raise DomainError(f"state shape {A.shape} does not match basis dimension {basis.d}")
    if abs(np.trace(A) - 1.0) > max(tol, 1e-9):
        raise DomainError(f"state trace {np.trace(A).real:.6g} is not 1")
    beta = basis.d / 2 * np.einsum("ij,kji->k", A, basis.lambdas).real
    return BlochVector(basis.d, beta)


def from_bloch(beta, basis: GellMannBasis) -> np.ndarray:
    """Hermitian trace-one matrix with Bloch coordinates ``beta``.

    Positivity is not implied and must be checked by the caller.
    """
    b = np.asarray(getattr(beta, "beta", beta), dtype=float)
    if b.shape != (len(basis),):
        raise DomainError(f"expected {len(basis)} coordinates, got shape {b.shape}")
    return (np.eye(basis.d) + np.tensordot(b, basis.lambdas, axes=1)) / basis.d


@lru_cache(maxsize=None)
def _structure_tensor(d: int) -> np.ndarray:
    lam = _gellmann(d)
    prod = np.einsum("kab,lbc->klac", lam, lam)
    anti = prod + prod.transpose(1, 0, 2, 3)
    t = np.einsum("klab,iba->kli", anti, lam).real / 4
    t.setflags(write=False)
    return t


def structure_tensor(basis: GellMannBasis) -> np.ndarray:
    """Real tensor ``t[k, l, i] = Tr({lambda_k, lambda_l} lambda_i) / 4``, symmetric in ``k, l``."""
    return _structure_tensor(basis.d)


def cup(x, y, tensor: np.ndarray) -> np.ndarray:
    """``(x cup y)_i = sum_{j,k} d_{ijk} x_j y_k``."""
    return np.einsum("ijk,j,k->i", tensor, np.asarray(x, float), np.asarray(y, float))


def is_pure(beta, basis: GellMannBasis, tol: float = 1e-9) -> bool:
    """Pure-state test on Bloch coordinates: norm and cup-product conditions."""
    b = np.asarray(getattr(beta, "beta", beta), dtype=float)
    d = basis.d
    norm_gap = abs(b @ b - (d * d - d) / 2)
    cup_gap = np.max(np.abs((d - 2) * b - cup(b, b, structure_tensor(basis))), initial=0.0)
    scale = max(1.0, (d * d - d) / 2)
    return bool(norm_gap <= tol * scale and cup_gap <= tol * scale)


def kappa(beta0, d: int) -> float:
    b0 = np.asarray(beta0, dtype=float)
    return float(np.sqrt(max(d * d - 2 * (b0 @ b0), 0.0) / d))


def represent_from_beta0(beta0, basis: GellMannBasis,
                         tol: float = matcore.DEFAULT_TOL) -> tuple[np.ndarray, BlochVector, float]:
    """Density matrix ``rho = H^2`` with ``H = (kappa I + sum beta0_i lambda_i) / d``.

    ``kappa = +sqrt((d^2 - 2|beta0|^2)/d)`` makes ``Tr rho = 1``, and the
    Bloch vector of ``rho`` is ``(2 kappa/d) beta0 + (beta0 cup beta0)/d``.
    Requires ``|beta0|^2 <= d^2/2``.
    """
    b0 = np.asarray(beta0, dtype=float)
    d = basis.d
    if b0.shape != (len(basis),):
        raise DomainError(f"expected {len(basis)} coordinates, got shape {b0.shape}")
    if b0 @ b0 > d * d / 2 * (1 + tol):
        raise DomainError(f"|beta0|^2 = {b0 @ b0:.6g} exceeds the bound d^2/2 = {d * d / 2:.6g}")
    k = kappa(b0, d)
    beta = 2 * k / d * b0 + cup(b0, b0, structure_tensor(basis)) / d
    H = (k * np.eye(d) + np.tensordot(b0, basis.lambdas, axes=1)) / d
    rho = matcore.hermitian_part(H @ H)
    return rho, BlochVector(d, beta), k


def random_pure_state(d: int, rng=None) -> np.ndarray:
    rng = np.random.default_rng(rng)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    v /= np.linalg.norm(v)
    return np.outer(v, v.conj())


def random_mixed_state(d: int, rng=None, rank: int | None = None) -> np.ndarray:
    """Random density matrix ``M M^* / Tr`` with ``M`` of shape ``d x rank``."""
    rng = np.random.default_rng(rng)
    r = d if rank is None else rank
    M = rng.standard_normal((d, r)) + 1j * rng.standard_normal((d, r))
    rho = M @ M.conj().T
    return rho / np.trace(rho).real
