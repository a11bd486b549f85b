"""Dense complex linear-algebra kernel.

Every matrix in psdkit is a two-dimensional ``numpy`` array of dtype
``complex128``.  Composite systems use the row-major index convention
``(k, p) -> k * d2 + p`` (0-based), so block ``(k, j)`` of a
``(d1*d2) x (d1*d2)`` matrix is the ``d2 x d2`` submatrix
``M[k*d2:(k+1)*d2, j*d2:(j+1)*d2]``.
"""

from __future__ import annotations

import numpy as np

from psdkit.errors import DomainError, NotPSDError

DEFAULT_TOL = 1e-10


def as_matrix(M) -> np.ndarray:
    """Return ``M`` as a 2-D complex array (scalars become 1x1)."""
    A = np.asarray(M, dtype=complex)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2:
        raise DomainError(f"expected a 2-D matrix, got shape {A.shape}")
    return A


def opnorm(M) -> float:
    """Spectral norm (largest singular value); 0 for empty input."""
    A = as_matrix(M)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def require_square(M) -> np.ndarray:
    A = as_matrix(M)
    if A.shape[0] != A.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {A.shape}")
    return A


def is_hermitian(M, tol: float = DEFAULT_TOL) -> bool:
    A = as_matrix(M)
    if A.shape[0] != A.shape[1]:
        return False
    scale = max(1.0, float(np.max(np.abs(A), initial=0.0)))
    return float(np.max(np.abs(A - A.conj().T), initial=0.0)) <= tol * scale


def require_hermitian(M, tol: float = DEFAULT_TOL) -> np.ndarray:
    A = require_square(M)
    if not is_hermitian(A, tol):
        raise DomainError("matrix is not Hermitian within tolerance")
    return A


def hermitian_part(M) -> np.ndarray:
    A = as_matrix(M)
    return (A + A.conj().T) / 2


def herm_eig(H, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix.

    Returns ``(w, V)`` with ``w`` sorted in descending order and ``V``
    unitary such that ``H = V @ diag(w) @ V^*``.
    """
    A = require_hermitian(H, tol)
    w, V = np.linalg.eigh(hermitian_part(A))
    return w[::-1].copy(), V[:, ::-1].copy()


def psd_cholesky(S, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Lower-triangular ``T`` with ``S = T T^*`` for positive semidefinite ``S``.

    Pivots in ``[-tol*|S|, tol*|S|]`` are treated as zero and the whole
    column of ``T`` is zeroed, so the factor keeps the original ordering.
    A pivot below ``-tol*|S|``, or a zero pivot whose column does not
    vanish, raises :class:`NotPSDError` with the 1-based leading index of
    the first principal submatrix proven indefinite.
    """
    A = require_hermitian(S, tol)
    n = A.shape[0]
    T = np.zeros((n, n), dtype=complex)
    scale = opnorm(A)
    if scale == 0.0:
        return T
    piv_tol = tol * scale
    col_tol = np.sqrt(tol) * scale
    for k in range(n):
        row = T[k, :k]
        pivot = A[k, k].real - float(np.sum(np.abs(row) ** 2))
        if pivot < -piv_tol:
            raise NotPSDError(
                f"not positive semidefinite: pivot {pivot:.3e} at index {k + 1}",
                index=k + 1,
                witness=pivot,
            )
        col = A[k + 1 :, k] - T[k + 1 :, :k] @ row.conj()
        if pivot <= piv_tol:
            bad = np.nonzero(np.abs(col) > col_tol)[0]
            if bad.size:
                index = k + 2 + int(bad[0])
                raise NotPSDError(
                    f"not positive semidefinite: zero pivot at {k + 1} with "
                    f"nonzero column entry at index {index}",
                    index=index,
                    witness=pivot,
                )
            continue
        root = np.sqrt(pivot)
        T[k, k] = root
        T[k + 1 :, k] = col / root
    return T


def charpoly_coeffs(H) -> np.ndarray:
    """Coefficients ``b_1..b_n`` of ``p(t) = t^n + sum_i (-1)^i b_i t^(n-i)``.

    ``b_i`` is the i-th elementary symmetric function of the eigenvalues,
    i.e. the sum of all ``i x i`` principal minors.  Computed with the
    Faddeev-LeVerrier recursion; the real part is returned since the input
    is assumed Hermitian.
    """
    A = require_square(H)
    n = A.shape[0]
    eye = np.eye(n, dtype=complex)
    M = np.zeros_like(A)
    c = 1.0 + 0j  # coefficient of t^(n-k+1) from the previous step
    b = np.empty(n)
    for k in range(1, n + 1):
        M = A @ M + c * eye
        c = -np.trace(A @ M) / k
        b[k - 1] = ((-1) ** k * c).real
    return b


def matrix_sqrt_psd(S, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Hermitian positive square root of a Hermitian PSD matrix.

    Eigenvalues in ``[-tol*max(1,|S|), 0)`` are clamped to zero; anything
    more negative raises :class:`NotPSDError` carrying the eigenvalue.
    """
    A = require_hermitian(S, tol)
    if A.size == 0:
        return A.copy()
    w, V = np.linalg.eigh(hermitian_part(A))
    scale = max(1.0, float(np.max(np.abs(w))))
    if w[0] < -tol * scale:
        raise NotPSDError(
            f"not positive semidefinite: eigenvalue {w[0]:.3e}", witness=float(w[0])
        )
    root = np.sqrt(np.clip(w, 0.0, None))
    R = (V * root) @ V.conj().T
    return hermitian_part(R)


def pinv(M, tol: float = DEFAULT_TOL, atol: float = 0.0) -> np.ndarray:
    """Moore-Penrose pseudoinverse.

    Singular values at or below ``max(tol * sigma_max, atol)`` are treated
    as zero.
    """
    A = as_matrix(M)
    if A.size == 0:
        return A.T.copy()
    U, s, Vh = np.linalg.svd(A, full_matrices=False)
    cutoff = max(tol * (s[0] if s.size else 0.0), atol)
    keep = s > cutoff
    inv = np.zeros_like(s)
    inv[keep] = 1.0 / s[keep]
    return (Vh.conj().T * inv) @ U.conj().T


def vec(V) -> np.ndarray:
    """Stack the columns of a ``d x e`` matrix into a ``de x 1`` column."""
    A = as_matrix(V)
    return A.reshape(-1, 1, order="F").copy()


def unvec(v, d: int, e: int) -> np.ndarray:
    """Inverse of :func:`vec`: rebuild the ``d x e`` matrix."""
    a = np.asarray(v, dtype=complex).reshape(-1)
    if a.size != d * e:
        raise DomainError(f"cannot unvec length {a.size} into {d}x{e}")
    return a.reshape(d, e, order="F").copy()


def _split(M, d1: int, d2: int) -> np.ndarray:
    A = as_matrix(M)
    n = d1 * d2
    if A.shape != (n, n):
        raise DomainError(f"expected a {n}x{n} matrix for dims ({d1}, {d2}), got {A.shape}")
    return A.reshape(d1, d2, d1, d2)


def partial_trace(M, d1: int, d2: int, which: str = "second") -> np.ndarray:
    """Partial trace of a ``(d1*d2)``-square matrix.

    ``which="first"`` traces out the block index and returns ``d2 x d2``;
    ``which="second"`` traces inside each block and returns ``d1 x d1``.
    """
    R = _split(M, d1, d2)
    if which == "first":
        return np.einsum("kpkq->pq", R)
    if which == "second":
        return np.einsum("kpjp->kj", R)
    raise DomainError(f"which must be 'first' or 'second', got {which!r}")


def partial_transpose(M, d1: int, d2: int) -> np.ndarray:
    """Transpose every ``d2 x d2`` block in place of itself."""
    R = _split(M, d1, d2)
    return R.transpose(0, 3, 2, 1).reshape(d1 * d2, d1 * d2).copy()


def det_lu(M) -> complex:
    """Determinant via LAPACK's partially pivoted LU."""
    A = require_square(M)
    if A.size == 0:
        return 1.0 + 0j
    return complex(np.linalg.det(A))


def numerical_rank(M, tol: float = 1e-8) -> int:
    """Number of singular values above ``tol * sigma_max``."""
    A = as_matrix(M)
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))
