"""Seeded randomized invariant suite behind ``psdkit selftest``.

The report holds only booleans, counts and worst-case errors printed to
three significant digits, so the same seed gives byte-identical output.
"""

from __future__ import annotations

import numpy as np

from psdkit import bloch, channel, matcore, positivity, relax, schur, toeplitz


def random_hermitian(d: int, rng, psd: bool) -> np.ndarray:
    """Random Hermitian test matrix.

    PSD instances are Gram matrices ``M^* M`` of a ``k x d`` Gaussian ``M``
    (rank ``k <= d``); indefinite ones shift a Gram matrix's spectrum so the
    smallest eigenvalue lands in ``[-1, -0.05]`` times the norm.
    """
    k = int(rng.integers(1, d + 1))
    M = rng.standard_normal((k, d)) + 1j * rng.standard_normal((k, d))
    H = matcore.hermitian_part(M.conj().T @ M)
    if psd:
        return H
    w = np.linalg.eigvalsh(H)
    shift = w[0] + rng.uniform(0.05, 1.0) * max(w[-1], 1.0)
    return H - shift * np.eye(d)


def _fmt(x: float) -> str:
    return f"{x:.2e}"


def _oracle_agreement(rng, n: int) -> dict:
    disagreements = 0
    for i in range(n):
        H = random_hermitian(int(rng.integers(2, 9)), rng, psd=i % 2 == 0)
        verdicts = positivity.consensus(H, strict=False)
        if len({v.is_psd for v in verdicts.values()}) != 1 or verdicts["p2"].is_psd != (i % 2 == 0):
            disagreements += 1
    return {"cases": n, "disagreements": disagreements, "pass": disagreements == 0}


def _schur_invariants(rng, n: int) -> dict:
    worst_eig = worst_rt = worst_det = worst_u = 0.0
    for _ in range(n):
        d = int(rng.integers(2, 9))
        p = schur.random_parameters(d, 1, rng)
        S = schur.reconstruct(p)
        norm = matcore.opnorm(S)
        worst_eig = max(worst_eig, -np.linalg.eigvalsh(S)[0] / norm)
        chain = schur.LatticeChain(p)
        for k in range(d):
            U = chain.unitary(k, d - 1)
            worst_u = max(worst_u, float(np.max(np.abs(U @ U.conj().T - np.eye(len(U))))))
        det = matcore.det_lu(S).real
        if det > 1e-12:
            worst_det = max(worst_det, abs(schur.determinant_formula(p) - det) / det)
        q = schur.random_parameters(d, 1, rng, radius=0.95)
        Sq = schur.reconstruct(q)
        e = schur.extract(Sq)
        worst_rt = max(worst_rt, float(np.max(np.abs(schur.reconstruct(e) - Sq))) / matcore.opnorm(Sq))
    return {
        "cases": n,
        "worst_negative_eigenvalue": _fmt(max(worst_eig, 0.0)),
        "worst_unitarity": _fmt(worst_u),
        "worst_det_rel": _fmt(worst_det),
        "worst_roundtrip": _fmt(worst_rt),
        "pass": worst_eig <= 1e-9 and worst_u <= 1e-9 and worst_det <= 1e-8 and worst_rt <= 1e-8,
    }


def _bloch_invariants(rng, n: int) -> dict:
    ok = True
    worst = 0.0
    for d in (3, 4):
        basis = bloch.gellmann(d)
        for _ in range(n):
            pure = bloch.to_bloch(bloch.random_pure_state(d, rng), basis)
            mixed = bloch.to_bloch(bloch.random_mixed_state(d, rng), basis)
            ok &= bloch.is_pure(pure, basis) and not bloch.is_pure(mixed, basis)
            b0 = rng.standard_normal(len(basis))
            b0 *= rng.uniform() * d / np.sqrt(2) / np.linalg.norm(b0)
            rho, beta, _ = bloch.represent_from_beta0(b0, basis)
            worst = max(worst, float(np.max(np.abs(bloch.to_bloch(rho, basis).beta - beta.beta))))
            ok &= positivity.check_p2_eigen(rho, 1e-9).is_psd
    return {"cases": 2 * n, "worst_beta_formula": _fmt(worst), "pass": bool(ok and worst <= 1e-9)}


def _channel_invariants(rng, n: int) -> dict:
    worst = 0.0
    agree = True
    for i in range(n):
        d_in, d_out = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        kind = ("cp", "tp", "unital")[i % 3]
        if kind == "unital":
            d_out = d_in
        r_min = -(-d_in // d_out) if kind == "tp" else 1
        K = channel.random_kraus(d_in, d_out, int(rng.integers(r_min, d_in * d_out + 1)), rng, kind)
        S = channel.choi_from_kraus(K)
        K2 = channel.kraus_from_choi(S)
        back = channel.choi_from_kraus(K2).matrix
        worst = max(worst, float(np.max(np.abs(back - S.matrix))) / max(1.0, matcore.opnorm(S.matrix)))
        agree &= channel.is_tp(S) == channel.kraus_is_tp(K2) == channel.kraus_is_tp(K)
        agree &= channel.is_unital(S) == channel.kraus_is_unital(K2) == channel.kraus_is_unital(K)
    return {"cases": n, "worst_roundtrip": _fmt(worst), "tp_unital_agree": bool(agree),
            "pass": bool(agree and worst <= 1e-8)}


def _toeplitz_invariants(rng, n: int) -> dict:
    worst = 0.0
    identities = True
    for _ in range(n):
        size = int(rng.choice([4, 6, 8, 9, 12]))
        A = toeplitz.random_positive_toeplitz(size, rng)
        for d1 in range(1, size + 1):
            if size % d1 == 0:
                w = np.linalg.eigvalsh(matcore.partial_transpose(A, d1, size // d1))[0]
                worst = max(worst, -w / matcore.opnorm(A))
                identities &= toeplitz.pt_identity_check(A, size // d1)
    for _ in range(n):
        blocks, size = int(rng.integers(2, 5)), int(rng.integers(2, 4))
        B = toeplitz.random_positive_block_toeplitz(blocks, size, rng)
        w = np.linalg.eigvalsh(matcore.partial_transpose(B, blocks, size))[0]
        worst = max(worst, -w / matcore.opnorm(B))
        identities &= toeplitz.param_transpose_check(B, size)
    return {"cases": 2 * n, "worst_pt_negative_eigenvalue": _fmt(max(worst, 0.0)),
            "identities": bool(identities), "pass": bool(identities and worst <= 1e-9)}


def _relax_invariants(rng, n: int) -> dict:
    disagreements = 0
    identities = True
    for _ in range(n):
        rates = dict(zip(relax.PAIRS4, rng.uniform(0, 1, 6).tolist()))
        report = relax.cp_constraints_n4(rates)
        eig = positivity.check_p2_eigen(report.b)
        if report.verdict != eig.is_psd or report.verdict != relax.printed_route_verdict(report):
            disagreements += 1
        identities &= relax.inequality_identity_check(rates)
    return {"cases": n, "disagreements": disagreements, "identities": bool(identities),
            "pass": bool(identities and disagreements == 0)}


def run(seed: int = 42, scale: int = 1) -> dict:
    """Run every module's randomized invariants with one seeded generator."""
    rng = np.random.default_rng(seed)
    sections = {
        "positivity": _oracle_agreement(rng, 100 * scale),
        "schur": _schur_invariants(rng, 50 * scale),
        "bloch": _bloch_invariants(rng, 25 * scale),
        "channel": _channel_invariants(rng, 30 * scale),
        "toeplitz": _toeplitz_invariants(rng, 20 * scale),
        "relax": _relax_invariants(rng, 200 * scale),
    }
    return {"seed": seed, "sections": sections, "pass": all(s["pass"] for s in sections.values())}
