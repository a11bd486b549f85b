"""Schur-Constantinescu parametrization of positive semidefinite block matrices.

A positive ``d x d`` block matrix ``S`` (blocks of size ``block``) is encoded by

* diagonal roots ``L[k]`` with ``S[k, k] = L[k]^* L[k]``, and
* contractions ``G[k, j]`` for ``0 <= k < j < d``,

through the lattice relation

    S[k, j] = L[k]^* (R(k, j-1) U(k+1, j-1) C(k+1, j)
                      + Dl(k, j) G[k, j] Dr(k, j)) L[j]

where ``R``/``C`` are the row/column contractions, ``U`` the unitary chain
built from Julia operators, and ``Dl``/``Dr`` the products of defect
operators along the left/right edges of the lattice.  All indices in this
module are 0-based; the JSON format uses the 1-based numbering instead.

Every contraction family gives a positive matrix, every positive matrix has
parameters, and in the strict interior (all ``|G| < 1``, all ``L`` positive
definite Hermitian) the parameters are unique.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from psdkit import matcore
from psdkit.errors import DomainError, NotPSDError, ResidualError

# Contractions whose singular values are this close to 1 are treated as
# isometric, so unimodular inputs that suffer rounding get an exact zero defect.
ISOMETRY_TOL = 1e-14
ROOT_CHOICES = ("sqrt", "chol")


@dataclass
class SchurParameters:
    """Diagonal roots plus strictly-upper contractions of a positive block matrix."""

    d: int
    block: int
    roots: list[np.ndarray]
    gammas: dict[tuple[int, int], np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        self.roots = [matcore.as_matrix(L) for L in self.roots]
        self.gammas = {(int(k), int(j)): matcore.as_matrix(g) for (k, j), g in self.gammas.items()}
        if len(self.roots) != self.d:
            raise DomainError(f"expected {self.d} diagonal roots, got {len(self.roots)}")
        shape = (self.block, self.block)
        for L in self.roots:
            if L.shape != shape:
                raise DomainError(f"diagonal root has shape {L.shape}, expected {shape}")
        for (k, j), g in self.gammas.items():
            if not 0 <= k < j < self.d:
                raise DomainError(f"gamma index ({k}, {j}) outside 0 <= k < j < {self.d}")
            if g.shape != shape:
                raise DomainError(f"gamma ({k}, {j}) has shape {g.shape}, expected {shape}")

    def gamma(self, k: int, j: int) -> np.ndarray:
        """Contraction ``G[k, j]``; missing entries (and the diagonal) are zero."""
        g = self.gammas.get((k, j))
        if g is None:
            return np.zeros((self.block, self.block), dtype=complex)
        return g

    @property
    def real_parameter_count(self) -> int:
        """Real degrees of freedom: ``d^2`` in the scalar case.

        Each contraction is a complex ``block x block`` matrix and each root
        contributes ``block^2`` reals (a Hermitian positive root).
        """
        pairs = self.d * (self.d - 1) // 2
        return 2 * pairs * self.block**2 + self.d * self.block**2

    def max_gamma_norm(self) -> float:
        return max((matcore.opnorm(g) for g in self.gammas.values()), default=0.0)

    def is_scalar(self) -> bool:
        return self.block == 1


def defect(T) -> np.ndarray:
    """Defect operator ``(I - T^* T)^(1/2)`` of a contraction.

    Singular values above one (rounding) are clamped to one.
    """
    A = matcore.as_matrix(T)
    _, s, Vh = np.linalg.svd(A)
    gap = np.clip(1.0 - s, 0.0, None)
    gap[gap <= ISOMETRY_TOL] = 0.0
    root = np.sqrt(gap * (2.0 - gap))
    # columns of A beyond its rank have zero singular value, hence defect 1
    full = np.ones(A.shape[1])
    full[: root.size] = root
    V = Vh.conj().T
    return matcore.hermitian_part((V * full) @ Vh)


def julia(T) -> np.ndarray:
    """Julia operator ``[[T, D_{T^*}], [D_T, -T^*]]``, a unitary dilation of ``T``."""
    A = matcore.as_matrix(T)
    return np.block([[A, defect(A.conj().T)], [defect(A), -A.conj().T]])


class LatticeChain:
    """Cached defects and unitary chains for one parameter family.

    Entries are computed lazily from ``params.gammas``; a cached value must
    not be requested before every contraction it depends on is in place.
    """

    def __init__(self, params: SchurParameters):
        self.params = params
        self.b = params.block
        self._defect: dict[tuple[int, int], np.ndarray] = {}
        self._defect_adj: dict[tuple[int, int], np.ndarray] = {}
        self._unitary: dict[tuple[int, int], np.ndarray] = {}

    def eye(self, n: int = 1) -> np.ndarray:
        return np.eye(n * self.b, dtype=complex)

    def D(self, k: int, j: int) -> np.ndarray:
        key = (k, j)
        if key not in self._defect:
            self._defect[key] = defect(self.params.gamma(k, j))
        return self._defect[key]

    def Dstar(self, k: int, j: int) -> np.ndarray:
        key = (k, j)
        if key not in self._defect_adj:
            self._defect_adj[key] = defect(self.params.gamma(k, j).conj().T)
        return self._defect_adj[key]

    def left_defects(self, k: int, j: int) -> np.ndarray:
        """``D_{G*[k,k+1]} ... D_{G*[k,j-1]}``."""
        out = self.eye()
        for l in range(k + 1, j):
            out = out @ self.Dstar(k, l)
        return out

    def right_defects(self, k: int, j: int) -> np.ndarray:
        """``D_{G[k+1,j]} ... D_{G[j-1,j]}``."""
        out = self.eye()
        for l in range(k + 1, j):
            out = out @ self.D(l, j)
        return out

    def row(self, k: int, j: int) -> np.ndarray:
        g = self.params.gamma
        blocks, pre = [], self.eye()
        for l in range(k + 1, j + 1):
            blocks.append(pre @ g(k, l))
            pre = pre @ self.Dstar(k, l)
        return np.hstack(blocks)

    def column(self, k: int, j: int) -> np.ndarray:
        g = self.params.gamma
        blocks, post = [], self.eye()
        for l in range(j - 1, k - 1, -1):
            blocks.append(g(l, j) @ post)
            post = self.D(l, j) @ post
        return np.vstack(blocks)

    def unitary(self, k: int, j: int) -> np.ndarray:
        key = (k, j)
        if key in self._unitary:
            return self._unitary[key]
        if j == k:
            U = self.eye()
        else:
            n = j - k + 1
            b = self.b
            U = self.eye(n)
            for l in range(1, j - k + 1):
                # Julia block of G[k, k+l] occupies block positions l-1, l
                sl = slice((l - 1) * b, (l + 1) * b)
                U[:, sl] = U[:, sl] @ julia(self.params.gamma(k, k + l))
            tail = self.eye(n)
            tail[: (n - 1) * b, : (n - 1) * b] = self.unitary(k + 1, j)
            U = U @ tail
        self._unitary[key] = U
        return U

    def path_sum(self, k: int, j: int) -> np.ndarray:
        """``R(k, j-1) U(k+1, j-1) C(k+1, j)``: every lattice path avoiding ``G[k, j]``."""
        if j <= k + 1:
            return np.zeros((self.b, self.b), dtype=complex)
        return self.row(k, j - 1) @ self.unitary(k + 1, j - 1) @ self.column(k + 1, j)

    def kernel_entry(self, k: int, j: int) -> np.ndarray:
        """Unit-diagonal kernel entry between the roots: ``S[k,j] = L_k^* K L_j``."""
        return self.path_sum(k, j) + self.left_defects(k, j) @ self.params.gamma(k, j) @ self.right_defects(k, j)


def _check_indices(params: SchurParameters, k: int, j: int, strict: bool):
    if not (0 <= k < params.d and 0 <= j < params.d):
        raise DomainError(f"indices ({k}, {j}) outside 0..{params.d - 1}")
    if strict and not k < j:
        raise DomainError(f"need k < j, got ({k}, {j})")
    if not strict and not k <= j:
        raise DomainError(f"need k <= j, got ({k}, {j})")


def row_contraction(params: SchurParameters, k: int, j: int) -> np.ndarray:
    """``[G[k,k+1], D*G[k,k+2], ..., D*...D* G[k,j]]`` as a ``block x (j-k)block`` matrix."""
    _check_indices(params, k, j, strict=True)
    return LatticeChain(params).row(k, j)


def column_contraction(params: SchurParameters, k: int, j: int) -> np.ndarray:
    """``[G[j-1,j]; G[j-2,j] D; ...; G[k,j] D...D]`` stacked into a column."""
    _check_indices(params, k, j, strict=True)
    return LatticeChain(params).column(k, j)


def unitary_chain(params: SchurParameters, k: int, j: int) -> np.ndarray:
    """Unitary ``U(k, j)`` of size ``(j-k+1)*block``.

    ``U(k, k)`` is the identity; otherwise the Julia operators of
    ``G[k, k+1], ..., G[k, j]`` are embedded at consecutive block positions,
    multiplied in order, and followed by ``U(k+1, j) (+) I``.
    """
    _check_indices(params, k, j, strict=False)
    return LatticeChain(params).unitary(k, j)


def reconstruct(params: SchurParameters) -> np.ndarray:
    """Assemble the positive matrix encoded by ``params``."""
    d, b = params.d, params.block
    chain = LatticeChain(params)
    S = np.zeros((d * b, d * b), dtype=complex)
    L = params.roots
    for k in range(d):
        S[k * b:(k + 1) * b, k * b:(k + 1) * b] = L[k].conj().T @ L[k]
        for j in range(k + 1, d):
            blk = L[k].conj().T @ chain.kernel_entry(k, j) @ L[j]
            S[k * b:(k + 1) * b, j * b:(j + 1) * b] = blk
            S[j * b:(j + 1) * b, k * b:(k + 1) * b] = blk.conj().T
    return S


def _diagonal_root(Skk: np.ndarray, root_choice: str, tol: float) -> np.ndarray:
    if root_choice == "sqrt":
        return matcore.matrix_sqrt_psd(Skk, tol)
    # upper-triangular factor, so that Skk = L^* L
    return matcore.psd_cholesky(Skk, tol).conj().T


def _clamp_contraction(G: np.ndarray) -> np.ndarray:
    """Project onto the closed unit ball by clipping singular values at one."""
    U, s, Vh = np.linalg.svd(G)
    if s.size and s[0] > 1.0:
        return (U * np.minimum(s, 1.0)) @ Vh
    return G


def extract(S, block: int = 1, root_choice: str = "sqrt",
            tol: float = matcore.DEFAULT_TOL) -> SchurParameters:
    """Recover the parameters of a positive block matrix.

    The input is first gated by an eigenvalue test.  Contractions are solved
    in order of increasing ``j - k``; each solve divides out the defect
    products with pseudo-inverses whose cutoff is ``sqrt(tol)``, so
    components hidden behind (near-)isometric parameters come out as zero.
    Each solution is projected onto the unit ball (near-singular defects can
    amplify rounding far past norm one) and the residual of the projected
    value is verified against ``sqrt(tol) * max(1, 2 sqrt(n |S| / m))``,
    where ``m`` is the smallest nonzero diagonal eigenvalue among the ``n``
    blocks involved.  That is the largest inconsistency a matrix passing the
    eigenvalue gate can carry: a coupling ``c`` to a null direction only
    lowers the spectrum by about ``c^2 / m``.  Larger residuals raise
    :class:`ResidualError`.  Diagonal blocks below ``tol * |S|`` get a zero
    root and zero contractions in their row and column.
    """
    if root_choice not in ROOT_CHOICES:
        raise DomainError(f"root_choice must be one of {ROOT_CHOICES}, got {root_choice!r}")
    A = matcore.require_hermitian(S, tol)
    n = A.shape[0]
    if block < 1 or n % block:
        raise DomainError(f"matrix size {n} is not a multiple of block size {block}")
    scale = max(1.0, matcore.opnorm(A))
    w = np.linalg.eigvalsh(matcore.hermitian_part(A))
    if w.size and w[0] < -tol * scale:
        raise NotPSDError(f"not positive semidefinite: eigenvalue {w[0]:.3e}", witness=float(w[0]))

    b = block
    d = n // b
    sub = lambda k, j: A[k * b:(k + 1) * b, j * b:(j + 1) * b]  # noqa: E731
    slack = np.sqrt(tol)
    root_cut = np.sqrt(tol * scale)

    roots, inv_roots, floors = [], [], []
    for k in range(d):
        Skk = matcore.hermitian_part(sub(k, k))
        wk = np.linalg.eigvalsh(Skk)
        floors.append(float(np.min(wk[wk > tol * scale], initial=np.inf)))
        if matcore.opnorm(Skk) <= tol * scale:
            L = np.zeros((b, b), dtype=complex)
        else:
            L = _diagonal_root(Skk, root_choice, tol)
        roots.append(L)
        inv_roots.append(matcore.pinv(L, tol, atol=root_cut))

    params = SchurParameters(d, b, roots)
    chain = LatticeChain(params)
    for gap in range(1, d):
        for k in range(d - gap):
            j = k + gap
            target = inv_roots[k].conj().T @ sub(k, j) @ inv_roots[j]
            if not (inv_roots[k].any() and inv_roots[j].any()):
                params.gammas[(k, j)] = np.zeros((b, b), dtype=complex)
                continue
            paths = chain.path_sum(k, j)
            Dl = chain.left_defects(k, j)
            Dr = chain.right_defects(k, j)
            G = matcore.pinv(Dl, tol, atol=slack) @ (target - paths) @ matcore.pinv(Dr, tol, atol=slack)
            G = _clamp_contraction(G)
            residual = matcore.opnorm(paths + Dl @ G @ Dr - target)
            floor = min(floors[k:j + 1])
            allowed = slack * max(1.0, 2.0 * np.sqrt((gap + 1) * scale / floor), matcore.opnorm(target))
            if residual > allowed:
                raise ResidualError(
                    f"inconsistent residual {residual:.3e} solving parameter ({k + 1}, {j + 1})"
                )
            params.gammas[(k, j)] = G
    return params


def determinant_formula(params: SchurParameters) -> float:
    """``det S = prod_k det(S[k,k]) * prod_{k<j} det(I - G^* G)``."""
    out = 1.0
    for L in params.roots:
        out *= matcore.det_lu(L.conj().T @ L).real
    eye = np.eye(params.block)
    for g in params.gammas.values():
        out *= matcore.det_lu(eye - g.conj().T @ g).real
    return float(out)


def cholesky_pivots(params: SchurParameters) -> list[np.ndarray]:
    """Diagonal blocks ``P_j`` of the Cholesky factorization, read off the lattice.

    ``P_j = L_j^* Dc_j^* Dc_j L_j`` with ``Dc_j = D_{G[0,j]} ... D_{G[j-1,j]}``
    is the Schur complement of the leading ``j`` blocks at block ``j``; in the
    scalar case it reduces to ``S[j,j] * prod_k (1 - |G[k,j]|^2)``.
    """
    chain = LatticeChain(params)
    out = []
    for j, L in enumerate(params.roots):
        Dc = chain.right_defects(-1, j) if j else chain.eye()
        F = Dc @ L
        out.append(F.conj().T @ F)
    return out


def _range_projector(M: np.ndarray, tol: float) -> np.ndarray:
    U, s, _ = np.linalg.svd(M)
    keep = s > tol * max(1.0, s[0] if s.size else 0.0)
    V = U[:, : int(np.sum(keep))]
    return V @ V.conj().T


def has_hidden_components(params: SchurParameters, tol: float = 1e-9) -> bool:
    """Whether some contraction has a part that never reaches the matrix.

    ``G[k, j]`` enters only through ``L_k^* Dl G Dr L_j``; anything outside
    the ranges of ``Dl^* L_k`` and ``Dr L_j`` is invisible in the
    reconstruction, yet still changes the defects of later parameters.
    :func:`extract` never produces such components.
    """
    chain = LatticeChain(params)
    for (k, j), g in params.gammas.items():
        P = _range_projector(chain.left_defects(k, j).conj().T @ params.roots[k], tol)
        Q = _range_projector(chain.right_defects(k, j) @ params.roots[j], tol)
        if matcore.opnorm(g - P @ g @ Q) > tol:
            return True
    return False


def is_rank_one(params: SchurParameters, tol: float = 1e-9) -> bool:
    """True when the encoded matrix has rank exactly one.

    The rank is the sum of the ranks of the lattice Cholesky pivots.  In
    the scalar case this is the rule that the matrix is rank one iff only one
    diagonal entry survives all its defects: every nonzero diagonal after the
    first is joined to an earlier one by a unimodular parameter.  The pivot
    formula assumes no hidden components (see :func:`has_hidden_components`);
    a family that has them is first replaced by the parameters extracted
    from its reconstruction.
    """
    if has_hidden_components(params, tol):
        params = extract(reconstruct(params), params.block)
    scale = max((matcore.opnorm(L) ** 2 for L in params.roots), default=0.0)
    if scale == 0.0:
        return False
    rank = 0
    for P in cholesky_pivots(params):
        w = np.linalg.eigvalsh(matcore.hermitian_part(P))
        rank += int(np.sum(w > tol * scale))
    return rank == 1


def truncate_leading(params: SchurParameters, m: int) -> SchurParameters:
    """Parameters of the leading ``m``-block principal submatrix (inheritance)."""
    if not 1 <= m <= params.d:
        raise DomainError(f"m must lie in 1..{params.d}, got {m}")
    gammas = {(k, j): g.copy() for (k, j), g in params.gammas.items() if j < m}
    return SchurParameters(m, params.block, [L.copy() for L in params.roots[:m]], gammas)


def cholesky_via_params(params: SchurParameters, tol: float = matcore.DEFAULT_TOL) -> np.ndarray:
    """Lower-triangular ``T`` with ``reconstruct(params) = T T^*``."""
    return matcore.psd_cholesky(reconstruct(params), tol)


def random_parameters(d: int, block: int = 1, rng=None, radius: float = 1.0,
                      hermitian_roots: bool = True) -> SchurParameters:
    """Draw a random parameter family.

    Contractions are uniform in norm on ``[0, radius]`` with Haar-random
    singular vectors; roots are Hermitian positive definite (or arbitrary
    square when ``hermitian_roots`` is false).
    """
    rng = np.random.default_rng(rng)
    roots = []
    for _ in range(d):
        M = rng.standard_normal((block, block)) + 1j * rng.standard_normal((block, block))
        if block == 1:
            M = np.abs(M) + 0.1 if hermitian_roots else M
            roots.append(M.astype(complex))
        elif hermitian_roots:
            roots.append(matcore.matrix_sqrt_psd(M @ M.conj().T + 0.1 * np.eye(block)))
        else:
            roots.append(M)
    gammas = {}
    for k in range(d):
        for j in range(k + 1, d):
            gammas[(k, j)] = random_contraction(block, rng, radius)
    return SchurParameters(d, block, roots, gammas)


def random_contraction(block: int, rng, radius: float = 1.0) -> np.ndarray:
    M = rng.standard_normal((block, block)) + 1j * rng.standard_normal((block, block))
    U, _, Vh = np.linalg.svd(M)
    s = radius * np.sqrt(rng.uniform(size=block))
    return (U * s) @ Vh
