import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from psdkit import bloch, matcore, positivity
from psdkit.errors import DomainError

PAULI = [
    np.array([[0, 1], [1, 0]]),
    np.array([[0, -1j], [1j, 0]]),
    np.array([[1, 0], [0, -1]]),
]

# textbook Gell-Mann label (1..8) -> position in the library's ordering
TEXTBOOK = {1: 0, 2: 3, 3: 6, 4: 1, 5: 4, 6: 2, 7: 5, 8: 7}

# nonzero independent symmetric structure constants for SU(3)
D_SU3 = {
    (1, 1, 8): 1 / np.sqrt(3), (2, 2, 8): 1 / np.sqrt(3), (3, 3, 8): 1 / np.sqrt(3),
    (8, 8, 8): -1 / np.sqrt(3),
    (4, 4, 8): -1 / (2 * np.sqrt(3)), (5, 5, 8): -1 / (2 * np.sqrt(3)),
    (6, 6, 8): -1 / (2 * np.sqrt(3)), (7, 7, 8): -1 / (2 * np.sqrt(3)),
    (1, 4, 6): 0.5, (1, 5, 7): 0.5, (2, 5, 6): 0.5, (3, 4, 4): 0.5, (3, 5, 5): 0.5,
    (2, 4, 7): -0.5, (3, 6, 6): -0.5, (3, 7, 7): -0.5,
}


def test_pauli_basis_exact():
    basis = bloch.gellmann(2)
    for lam, sigma in zip(basis.lambdas, PAULI):
        assert np.array_equal(lam, sigma)


def test_textbook_su3_matrices():
    lam = bloch.gellmann(3).lambdas
    assert np.allclose(lam[TEXTBOOK[8]], np.diag([1, 1, -2]) / np.sqrt(3))
    assert np.array_equal(lam[TEXTBOOK[5]], [[0, 0, -1j], [0, 0, 0], [1j, 0, 0]])
    assert np.array_equal(lam[TEXTBOOK[3]], np.diag([1, -1, 0]))


@pytest.mark.parametrize("d", range(2, 7))
def test_orthogonality(d):
    lam = bloch.gellmann(d).lambdas
    assert len(lam) == d * d - 1
    gram = np.einsum("iab,jba->ij", lam, lam)
    assert np.max(np.abs(gram - 2 * np.eye(d * d - 1))) <= 1e-12
    assert np.allclose(np.trace(lam, axis1=1, axis2=2), 0)
    assert all(np.allclose(x, x.conj().T) for x in lam)


def test_su3_structure_constants():
    t = bloch.structure_tensor(bloch.gellmann(3))
    expected = np.zeros((8, 8, 8))
    for labels, value in D_SU3.items():
        idx = [TEXTBOOK[a] for a in labels]
        for a, b, c in {(idx[0], idx[1], idx[2]), (idx[1], idx[0], idx[2]), (idx[0], idx[2], idx[1]),
                        (idx[2], idx[0], idx[1]), (idx[1], idx[2], idx[0]), (idx[2], idx[1], idx[0])}:
            expected[a, b, c] = value
    assert np.allclose(t, expected, atol=1e-14)
    assert t[TEXTBOOK[1], TEXTBOOK[1], TEXTBOOK[8]] == pytest.approx(1 / np.sqrt(3))


@pytest.mark.parametrize("d", [3, 4])
def test_structure_tensor_against_loop(d):
    basis = bloch.gellmann(d)
    lam = basis.lambdas
    n = len(lam)
    t = bloch.structure_tensor(basis)
    for k in range(n):
        for l in range(n):
            anti = lam[k] @ lam[l] + lam[l] @ lam[k]
            for i in range(n):
                assert t[k, l, i] == pytest.approx(np.trace(anti @ lam[i]).real / 4, abs=1e-14)
            # anticommutator expansion in the normalization used for the cup product
            rebuilt = 4 / d * (k == l) * np.eye(d) + 2 * np.tensordot(t[k, l], lam, axes=1)
            assert np.allclose(anti, rebuilt, atol=1e-13)


def test_structure_tensor_vanishes_for_qubits():
    assert np.allclose(bloch.structure_tensor(bloch.gellmann(2)), 0)


def test_cup_basics(rng):
    basis = bloch.gellmann(3)
    t = bloch.structure_tensor(basis)
    y = rng.standard_normal(8)
    assert np.allclose(bloch.cup(np.zeros(8), y, t), 0)
    x = rng.standard_normal(8)
    assert np.allclose(bloch.cup(x, y, t), bloch.cup(y, x, t))
    q = bloch.gellmann(2)
    assert np.allclose(bloch.cup(x[:3], y[:3], bloch.structure_tensor(q)), 0)


def test_to_bloch_fixtures():
    assert np.allclose(bloch.to_bloch(np.eye(3) / 3, bloch.gellmann(3)).beta, 0)
    assert np.allclose(bloch.to_bloch(np.diag([1.0, 0.0]), bloch.gellmann(2)).beta, [0, 0, 1])


@pytest.mark.parametrize("d", [2, 3, 5])
def test_bloch_round_trip(rng, d):
    basis = bloch.gellmann(d)
    rho = bloch.random_mixed_state(d, rng)
    assert np.allclose(bloch.from_bloch(bloch.to_bloch(rho, basis), basis), rho, atol=1e-12)


def test_to_bloch_domain_errors():
    basis = bloch.gellmann(2)
    with pytest.raises(DomainError):
        bloch.to_bloch(np.eye(2), basis)
    with pytest.raises(DomainError):
        bloch.to_bloch(np.eye(3) / 3, basis)
    with pytest.raises(DomainError):
        bloch.gellmann(1)


def test_purity_fixtures():
    assert bloch.is_pure([0.6, 0.0, 0.8], bloch.gellmann(2))
    basis = bloch.gellmann(3)
    beta = bloch.to_bloch(np.diag([1.0, 0.0, 0.0]), basis).beta
    d = 3
    assert abs(beta @ beta - (d * d - d) / 2) <= 1e-10
    t = bloch.structure_tensor(basis)
    assert np.max(np.abs((d - 2) * beta - bloch.cup(beta, beta, t))) <= 1e-10
    assert not bloch.is_pure(np.zeros(8), basis)


@pytest.mark.parametrize("d", [3, 4, 5])
def test_purity_matches_rank(rng, d):
    basis = bloch.gellmann(d)
    for _ in range(10):
        assert bloch.is_pure(bloch.to_bloch(bloch.random_pure_state(d, rng), basis), basis)
        mixed = bloch.random_mixed_state(d, rng, rank=int(rng.integers(2, d + 1)))
        assert not bloch.is_pure(bloch.to_bloch(mixed, basis), basis)


def test_pure_state_charpoly(rng):
    for d in (2, 3, 4):
        b = matcore.charpoly_coeffs(bloch.random_pure_state(d, rng))
        assert b[0] == pytest.approx(1)
        assert np.allclose(b[1:], 0, atol=1e-12)


def test_represent_zero_vector():
    rho, beta, k = bloch.represent_from_beta0(np.zeros(8), bloch.gellmann(3))
    assert k == pytest.approx(np.sqrt(3))
    assert np.allclose(rho, np.eye(3) / 3)
    assert np.allclose(beta.beta, 0)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 4), st.floats(0, 1), st.integers(0, 2**32 - 1))
def test_represent_gives_states(d, radius, seed):
    basis = bloch.gellmann(d)
    b0 = np.random.default_rng(seed).standard_normal(len(basis))
    b0 *= radius * d / np.sqrt(2) / np.linalg.norm(b0)
    rho, beta, k = bloch.represent_from_beta0(b0, basis)
    assert np.trace(rho).real == pytest.approx(1, abs=1e-12)
    assert positivity.check_p2_eigen(rho, 1e-9).is_psd
    assert np.allclose(bloch.to_bloch(rho, basis).beta, beta.beta, atol=1e-9)
    assert k * k == pytest.approx((d * d - 2 * b0 @ b0) / d, abs=1e-12)


def test_represent_rejects_large_vectors():
    with pytest.raises(DomainError):
        bloch.represent_from_beta0([2.0, 0.0, 0.0], bloch.gellmann(2))
