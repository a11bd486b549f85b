"""Dissipator assembly and complete-positivity constraints on relaxation rates.

Rates are in arbitrary but consistent inverse-time units.  Levels are
numbered ``1..N`` in the public formats; arrays here are 0-based.

For four levels, complete positivity of the evolution reduces to positivity
of a real symmetric 3x3 matrix ``B`` built from the six pure-dephasing rates
``Gd[m, n]``.  Its Schur parameters ``g12, g23, g13`` must lie in [-1, 1],
which unfolds into explicit polynomial inequalities in the rates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from psdkit import matcore, positivity, schur
from psdkit.errors import CapacityError, DomainError, NotPSDError, ResidualError

PAIRS4 = ("12", "13", "14", "23", "24", "34")


@dataclass
class RelaxationRates:
    """Population rates ``gamma[k, n]`` (from level n to level k) and dephasing rates.

    ``Gamma_p`` (dephasing induced by population relaxation) and ``Gamma_d``
    (pure dephasing) are symmetric with zero diagonal; the total dephasing
    rate is their sum.
    """

    N: int
    gamma: np.ndarray
    Gamma_p: np.ndarray = None
    Gamma_d: np.ndarray = None

    def __post_init__(self):
        shape = (self.N, self.N)
        self.gamma = np.asarray(self.gamma, dtype=float)
        self.Gamma_p = np.zeros(shape) if self.Gamma_p is None else np.asarray(self.Gamma_p, float)
        self.Gamma_d = np.zeros(shape) if self.Gamma_d is None else np.asarray(self.Gamma_d, float)
        for name in ("gamma", "Gamma_p", "Gamma_d"):
            M = getattr(self, name)
            if M.shape != shape:
                raise DomainError(f"{name} has shape {M.shape}, expected {shape}")
            if np.any(M < 0):
                raise DomainError(f"{name} has negative rates")
            if np.any(np.diag(M) != 0):
                raise DomainError(f"{name} must have a zero diagonal")
        for name in ("Gamma_p", "Gamma_d"):
            M = getattr(self, name)
            if not np.array_equal(M, M.T):
                raise DomainError(f"{name} must be symmetric")

    @property
    def Gamma(self) -> np.ndarray:
        return self.Gamma_p + self.Gamma_d


def symmetric_from_pairs(pairs: dict[str, float], N: int) -> np.ndarray:
    """Symmetric zero-diagonal matrix from ``{"mn": value}`` with 1-based ``m < n``."""
    M = np.zeros((N, N))
    for key, value in pairs.items():
        m, n = _pair(key, N)
        M[m, n] = M[n, m] = float(value)
    return M


def _pair(key: str, N: int) -> tuple[int, int]:
    parts = key.split(",") if "," in key else list(key)
    if len(parts) != 2:
        raise DomainError(f"cannot read level pair {key!r}")
    m, n = (int(p) - 1 for p in parts)
    if not (0 <= m < N and 0 <= n < N) or m == n:
        raise DomainError(f"invalid level pair {key!r} for N={N}")
    return m, n


def superindex(m: int, n: int, N: int) -> int:
    """0-based position of the coherence ``(m, n)`` in ``vec(rho)``."""
    return m + n * N


def build_LD(rates: RelaxationRates) -> np.ndarray:
    """Dissipative generator acting on column-stacked ``vec(rho)``, ``N^2 x N^2``."""
    N = rates.N
    L = np.zeros((N * N, N * N))
    Gamma = rates.Gamma
    for m in range(N):
        for n in range(N):
            if m != n:
                i = superindex(m, n, N)
                L[i, i] = -Gamma[m, n]
                L[superindex(m, m, N), superindex(n, n, N)] = rates.gamma[m, n]
        i = superindex(m, m, N)
        L[i, i] = -sum(rates.gamma[k, m] for k in range(N) if k != m)
    return L


def _rates4(Gamma_d) -> dict[str, float]:
    if isinstance(Gamma_d, dict):
        missing = set(PAIRS4) - set(Gamma_d)
        if missing:
            raise DomainError(f"missing dephasing rates {sorted(missing)}")
        out = {k: float(Gamma_d[k]) for k in PAIRS4}
    else:
        M = np.asarray(Gamma_d, dtype=float)
        if M.shape == (4, 4):
            out = {f"{m + 1}{n + 1}": float(M[m, n]) for m, n in combinations(range(4), 2)}
        elif M.shape == (6,):
            out = dict(zip(PAIRS4, M.tolist()))
        else:
            raise DomainError("four-level dephasing rates need 6 values or a 4x4 matrix")
    if any(v < 0 for v in out.values()):
        raise DomainError("dephasing rates must be non-negative")
    return out


def gamma_tot(Gamma_d) -> float:
    """Half the sum of the six pure-dephasing rates."""
    return sum(_rates4(Gamma_d).values()) / 2


def b_matrix(Gamma_d) -> np.ndarray:
    g = _rates4(Gamma_d)
    tot = sum(g.values()) / 2
    B = np.empty((3, 3))
    B[0, 0] = tot - (g["13"] + g["24"])
    B[1, 1] = tot - (g["14"] + g["23"])
    B[2, 2] = tot - (g["12"] + g["34"])
    B[0, 1] = B[1, 0] = (g["12"] - g["34"]) / 2
    B[0, 2] = B[2, 0] = (g["14"] - g["23"]) / 2
    B[1, 2] = B[2, 1] = (g["13"] - g["24"]) / 2
    return B


def printed_inequalities(Gamma_d) -> dict[str, float]:
    """Left-hand sides (minus right-hand sides) of the explicit rate inequalities.

    Keys ``b11``, ``b22``, ``b33`` are twice the diagonal of ``B``; ``g12`` and
    ``g23`` are the expanded quartic forms; ``g13`` is the determinant-style
    condition.  Each must be non-negative.
    """
    g = _rates4(Gamma_d)
    B = b_matrix(g)
    g12, g13, g14, g23, g24, g34 = (g[k] for k in PAIRS4)
    return {
        "b11": g12 + g14 + g23 + g34 - (g13 + g24),
        "b22": g12 + g13 + g24 + g34 - (g14 + g23),
        "b33": g13 + g14 + g23 + g24 - (g12 + g34),
        "g12": (4 * g12 * g34 - (g13 - g14) ** 2 - (g13 - g23) ** 2 + (g13 - g24) ** 2
                + (g14 - g23) ** 2 - (g14 - g24) ** 2 - (g23 - g24) ** 2),
        "g23": (4 * g13 * g24 - (g12 - g14) ** 2 - (g12 - g23) ** 2 + (g12 - g34) ** 2
                + (g14 - g23) ** 2 - (g14 - g34) ** 2 - (g23 - g34) ** 2),
        "g13": (B[0, 0] * B[1, 1] * B[2, 2] + 2 * B[0, 1] * B[0, 2] * B[1, 2]
                - B[0, 0] * B[1, 2] ** 2 - B[1, 1] * B[0, 2] ** 2 - B[2, 2] * B[0, 1] ** 2),
    }


def inequality_identity_check(Gamma_d, tol: float = 1e-10) -> bool:
    """The expanded g12 form equals both its compact version and ``4(b11 b22 - b12^2)``.

    The same is checked for g23 against ``4(b22 b33 - b23^2)``.
    """
    g = _rates4(Gamma_d)
    B = b_matrix(g)
    ineq = printed_inequalities(g)
    compact12 = 4 * g["12"] * g["34"] - (g["14"] + g["23"] - g["13"] - g["24"]) ** 2
    via_b12 = 4 * (B[0, 0] * B[1, 1] - B[0, 1] ** 2)
    via_b23 = 4 * (B[1, 1] * B[2, 2] - B[1, 2] ** 2)
    scale = max(1.0, max(g.values()) ** 2)
    return bool(
        abs(ineq["g12"] - compact12) <= tol * scale
        and abs(ineq["g12"] - via_b12) <= tol * scale
        and abs(ineq["g23"] - via_b23) <= tol * scale
    )


@dataclass
class CpReport:
    b: np.ndarray
    diag_ok: tuple[bool, bool, bool]
    g12: float | None
    g23: float | None
    g13: float | None
    inequality_values: dict[str, float]
    verdict: bool
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "b": self.b.tolist(),
            "diag_ok": list(self.diag_ok),
            "g12": self.g12,
            "g23": self.g23,
            "g13": self.g13,
            "inequality_values": self.inequality_values,
            "verdict": self.verdict,
            "notes": self.notes,
        }


def _direct_parameters(B: np.ndarray, tol: float) -> tuple[list[float | None], list[str]]:
    """Parameters ``(g12, g23, g13)`` of a ``B`` that failed the positivity gate.

    A parameter is ``None`` when it cannot be formed: a negative diagonal
    entry it depends on, a nonzero entry next to a zero diagonal, or (for
    ``g13``) a neighbouring parameter outside (-1, 1).
    """
    notes = []
    scale = max(1.0, matcore.opnorm(B))

    def pair(k, j):
        if B[k, k] < -tol * scale or B[j, j] < -tol * scale:
            return None
        if B[k, k] <= tol * scale or B[j, j] <= tol * scale:
            if abs(B[k, j]) > np.sqrt(tol) * scale:
                # a zero diagonal entry forces a zero row: no parameter fits
                notes.append(f"b{k + 1}{j + 1} is nonzero next to a zero diagonal: g{k + 1}{j + 1} undetermined")
                return None
            return 0.0
        return float(B[k, j] / np.sqrt(B[k, k] * B[j, j]))

    g12, g23, g13_direct = pair(0, 1), pair(1, 2), pair(0, 2)
    g13 = None
    if None not in (g12, g23, g13_direct) and abs(g12) < 1 and abs(g23) < 1:
        g13 = float((g13_direct - g12 * g23) / np.sqrt((1 - g12**2) * (1 - g23**2)))
    elif g13_direct is not None:
        notes.append("g13 undetermined: a neighbouring parameter lies outside (-1, 1)")
    return [g12, g23, g13], notes


def cp_constraints_n4(Gamma_d, tol: float = 1e-10) -> CpReport:
    """Complete-positivity report for a four-level system's pure-dephasing rates.

    The parameters come from :func:`psdkit.schur.extract`, whose positivity
    gate rejects a non-positive ``B``; in that case the verdict is false and
    the parameters are formed directly from the entries for diagnosis.
    """
    B = b_matrix(Gamma_d)
    scale = max(1.0, matcore.opnorm(B))
    diag_ok = tuple(bool(B[i, i] >= -tol * scale) for i in range(3))
    notes = []
    try:
        params = schur.extract(B, 1, "sqrt", tol)
    except (NotPSDError, ResidualError) as exc:
        notes.append(f"extraction failed: {exc}")
        (g12, g23, g13), more = _direct_parameters(B, tol)
        notes.extend(more)
        verdict = False
    else:
        g12, g23, g13 = (params.gamma(k, j)[0, 0].real for k, j in ((0, 1), (1, 2), (0, 2)))
        for k, j in ((0, 1), (1, 2), (0, 2)):
            if B[k, k] <= tol * scale or B[j, j] <= tol * scale:
                notes.append(f"b{k + 1}{k + 1} or b{j + 1}{j + 1} is zero: g{k + 1}{j + 1} set to 0")
        verdict = all(diag_ok) and all(abs(g) <= 1 + tol for g in (g12, g23, g13))
    if positivity.check_p2_eigen(B, tol).is_psd != verdict:
        notes.append("parameter route and eigenvalue route disagree")
    return CpReport(B, diag_ok, g12, g23, g13, printed_inequalities(Gamma_d), verdict, notes)


def printed_route_verdict(report: CpReport, tol: float = 1e-10) -> bool:
    """Verdict from the explicit inequalities alone.

    When ``b11 b22 = 0`` (or ``b22 b33 = 0``) the corresponding g12 (g23)
    inequality is vacuous and the off-diagonal entry must vanish instead;
    the quartic forms then reduce to ``-4 b12^2``, so requiring them to be
    non-negative covers that case too.
    """
    v = report.inequality_values
    scale = max(1.0, float(np.max(np.abs(report.b))))
    return all(v[k] >= -tol * scale**3 if k == "g13" else v[k] >= -tol * scale**2
               for k in v)


def check_levels(N: int):
    if N != 4:
        raise CapacityError("the reduced complete-positivity test is only available for N = 4")
