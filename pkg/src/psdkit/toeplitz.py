"""Toeplitz and block-Toeplitz states and their partial transposes.

Two routes show that positive (block-)Toeplitz matrices have a positive
partial transpose:

* index reversal: for a fully Toeplitz ``A`` of size ``N*M``, reversing the
  order inside each length-``N`` group of indices maps ``A`` onto its partial
  transpose, a permutation similarity;
* parameters: a block-Toeplitz matrix has contractions depending only on
  ``j - k``, and transposing the root and every contraction reconstructs the
  partial transpose, because ``U(G)^T = U(G^T)``.

Permutations are 0-based arrays ``p`` acting as ``(R_p C_p A)[i, j] = A[p[i], p[j]]``.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from psdkit import matcore, positivity, schur
from psdkit.errors import DomainError
from psdkit.positivity import PositivityVerdict


def build_toeplitz(symbols: dict[int, complex] | Sequence, n: int | None = None) -> np.ndarray:
    """``A[i, j] = a_{i-j}``.

    ``symbols`` is either a mapping ``offset -> value`` covering
    ``-(n-1)..n-1`` (missing offsets are zero), or a sequence
    ``(a_{-(n-1)}, ..., a_0, ..., a_{n-1})`` of odd length ``2n - 1``.
    """
    return build_block_toeplitz(_as_symbol_map(symbols, scalar=True), n)


def build_block_toeplitz(blocks: dict[int, np.ndarray] | Sequence, n: int | None = None) -> np.ndarray:
    """Block matrix with block ``(i, j)`` equal to ``a_{i-j}``.

    Same conventions as :func:`build_toeplitz` but the symbols are square
    matrices of a common size.  Missing offsets are zero blocks.
    """
    sym = _as_symbol_map(blocks, scalar=False)
    if n is None:
        n = max(abs(k) for k in sym) + 1
    size = next(iter(sym.values())).shape[0]
    zero = np.zeros((size, size), dtype=complex)
    rows = [[sym.get(i - j, zero) for j in range(n)] for i in range(n)]
    return np.block(rows)


def _as_symbol_map(symbols, scalar: bool) -> dict[int, np.ndarray]:
    if isinstance(symbols, dict):
        items = symbols.items()
    else:
        seq = list(symbols)
        if len(seq) % 2 != 1:
            raise DomainError("symbol sequence must have odd length 2n-1")
        half = len(seq) // 2
        items = zip(range(-half, half + 1), seq)
    out = {int(k): matcore.as_matrix(v) for k, v in items}
    if not out:
        raise DomainError("no symbols given")
    shapes = {v.shape for v in out.values()}
    if len(shapes) != 1 or (scalar and shapes != {(1, 1)}):
        raise DomainError(f"inconsistent symbol shapes {shapes}")
    return out


def is_toeplitz(A, block: int = 1, tol: float = 0.0) -> bool:
    """Whether every block diagonal of ``A`` is constant within ``tol``."""
    M = matcore.require_square(A)
    if M.shape[0] % block:
        return False
    n = M.shape[0] // block
    for i in range(1, n):
        for j in range(1, n):
            a = M[i * block:(i + 1) * block, j * block:(j + 1) * block]
            b = M[(i - 1) * block:i * block, (j - 1) * block:j * block]
            if np.max(np.abs(a - b)) > tol:
                return False
    return True


def sigma0(n: int) -> np.ndarray:
    """Order reversal ``i -> n - 1 - i``."""
    return np.arange(n)[::-1].copy()


def sigma_block(N: int, M: int) -> np.ndarray:
    """Reversal inside each of the ``M`` consecutive groups of ``N`` indices."""
    return np.concatenate([m * N + sigma0(N) for m in range(M)]) if M else np.arange(0)


def permute_rows_cols(A, sigma) -> np.ndarray:
    """``R_sigma C_sigma A``: entry ``(i, j)`` becomes ``A[sigma[i], sigma[j]]``."""
    M = matcore.require_square(A)
    p = np.asarray(sigma, dtype=int)
    if p.shape != (M.shape[0],) or sorted(p.tolist()) != list(range(M.shape[0])):
        raise DomainError("sigma is not a permutation of the matrix indices")
    return M[np.ix_(p, p)]


def transpose_identity_check(A, tol: float = 0.0) -> bool:
    """``R_sigma0 C_sigma0 A == A^T``; exact (``tol = 0``) by default."""
    M = matcore.require_square(A)
    P = permute_rows_cols(M, sigma0(M.shape[0]))
    return bool(np.max(np.abs(P - M.T), initial=0.0) <= tol)


def pt_identity_check(A, block: int, tol: float = 0.0) -> bool:
    """``R_sigma C_sigma A == A^PT`` with ``sigma`` reversing inside each block.

    Holds for every fully Toeplitz ``A``; for block-Toeplitz matrices whose
    blocks are not themselves Toeplitz it generally fails.
    """
    M = matcore.require_square(A)
    if M.shape[0] % block:
        raise DomainError(f"size {M.shape[0]} not divisible by block {block}")
    groups = M.shape[0] // block
    P = permute_rows_cols(M, sigma_block(block, groups))
    return bool(np.max(np.abs(P - matcore.partial_transpose(M, groups, block)), initial=0.0) <= tol)


def ppt_verdict(S, d1: int, d2: int, tol: float = matcore.DEFAULT_TOL) -> PositivityVerdict:
    """Positivity verdict of the partial transpose on the inner (``d2``) factor."""
    return positivity.check_p2_eigen(matcore.partial_transpose(S, d1, d2), tol)


def toeplitz_parameters(root, contractions: Sequence) -> schur.SchurParameters:
    """Parameter family of a block-Toeplitz matrix: ``G[k, j] = contractions[j-k-1]``."""
    L = matcore.as_matrix(root)
    gs = [matcore.as_matrix(g) for g in contractions]
    d = len(gs) + 1
    gammas = {(k, j): gs[j - k - 1] for k in range(d) for j in range(k + 1, d)}
    return schur.SchurParameters(d, L.shape[0], [L] * d, gammas)


def block_toeplitz_from_params(A, gamma1, gamma2) -> np.ndarray:
    """Three-block positive block-Toeplitz matrix from a diagonal block and two contractions.

    Blocks above the diagonal are ``R G1 R`` and
    ``R (G1^2 + D_{G1^*} G2 D_{G1}) R`` with ``R = A^(1/2)``.
    """
    R = matcore.matrix_sqrt_psd(A)
    G1, G2 = matcore.as_matrix(gamma1), matcore.as_matrix(gamma2)
    a1 = R @ G1 @ R
    a2 = R @ (G1 @ G1 + schur.defect(G1.conj().T) @ G2 @ schur.defect(G1)) @ R
    return build_block_toeplitz({0: R @ R, 1: a1.conj().T, 2: a2.conj().T, -1: a1, -2: a2}, 3)


def transpose_parameters(params: schur.SchurParameters) -> schur.SchurParameters:
    """Entrywise transpose of every root and contraction."""
    return schur.SchurParameters(
        params.d,
        params.block,
        [L.T.copy() for L in params.roots],
        {key: g.T.copy() for key, g in params.gammas.items()},
    )


def param_transpose_check(B, block: int, tol: float = 1e-8) -> bool:
    """Whether transposed parameters of ``B`` reconstruct ``B^PT`` within ``tol * |B|``.

    Parameters are extracted with positive square-root diagonal roots.
    """
    M = matcore.require_hermitian(B)
    groups = M.shape[0] // block
    params = schur.extract(M, block, "sqrt")
    candidate = schur.reconstruct(transpose_parameters(params))
    target = matcore.partial_transpose(M, groups, block)
    return bool(np.max(np.abs(candidate - target)) <= tol * max(1.0, matcore.opnorm(M)))


def random_positive_toeplitz(n: int, rng=None, radius: float = 1.0) -> np.ndarray:
    """Random positive scalar Toeplitz matrix built from single-index parameters.

    Rejection-samples until the result passes the Toeplitz audit (it always
    does for shift-invariant parameters; the audit guards the construction).
    """
    rng = np.random.default_rng(rng)
    while True:
        root = rng.uniform(0.2, 2.0)
        gs = [schur.random_contraction(1, rng, radius) for _ in range(n - 1)]
        A = schur.reconstruct(toeplitz_parameters(root, gs))
        if is_toeplitz(A, 1, tol=1e-12 * max(1.0, matcore.opnorm(A))):
            return _symmetrize_toeplitz(A, 1)


def random_positive_block_toeplitz(blocks: int, size: int, rng=None, radius: float = 1.0) -> np.ndarray:
    rng = np.random.default_rng(rng)
    while True:
        M = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
        root = matcore.matrix_sqrt_psd(M @ M.conj().T + 0.1 * np.eye(size))
        gs = [schur.random_contraction(size, rng, radius) for _ in range(blocks - 1)]
        A = schur.reconstruct(toeplitz_parameters(root, gs))
        if is_toeplitz(A, size, tol=1e-12 * max(1.0, matcore.opnorm(A))):
            return _symmetrize_toeplitz(A, size)


def _symmetrize_toeplitz(A: np.ndarray, block: int) -> np.ndarray:
    """Replace every block diagonal by its first block so the structure is exact."""
    n = A.shape[0] // block
    first_row = {j: A[:block, j * block:(j + 1) * block] for j in range(n)}
    sym = {-j: blk for j, blk in first_row.items()}
    sym.update({j: blk.conj().T for j, blk in first_row.items() if j > 0})
    return build_block_toeplitz(sym, n)
