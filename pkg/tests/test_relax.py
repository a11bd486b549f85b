import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from psdkit import positivity, relax
from psdkit.errors import CapacityError, DomainError
from psdkit.relax import RelaxationRates

EQUAL = dict.fromkeys(relax.PAIRS4, 0.7)
OPPOSITE = {"12": 0, "13": 1, "14": 0, "23": 0, "24": 1, "34": 0}

rates6 = st.lists(st.floats(0, 5, allow_nan=False), min_size=6, max_size=6)


def test_ld_two_levels():
    g, G = 0.3, 0.8
    gamma = np.array([[0, g], [0, 0]])
    L = relax.build_LD(RelaxationRates(2, gamma, Gamma_d=np.array([[0, G], [G, 0]])))
    expected = np.zeros((4, 4))
    expected[0, 3] = g
    expected[3, 3] = -g
    expected[1, 1] = expected[2, 2] = -G
    assert np.array_equal(L, expected)


def test_ld_zero_rates():
    assert not relax.build_LD(RelaxationRates(3, np.zeros((3, 3)))).any()


def test_ld_population_conservation(rng):
    # dyadic rates keep every sum exact, so the columns cancel to exactly zero
    N = 4
    gamma = rng.integers(0, 64, (N, N)) / 16
    np.fill_diagonal(gamma, 0)
    Gd = relax.symmetric_from_pairs({"12": 0.1, "34": 0.4, "2,4": 0.2}, N)
    L = relax.build_LD(RelaxationRates(N, gamma, Gamma_d=Gd))
    pops = [relax.superindex(m, m, N) for m in range(N)]
    assert np.all(np.sum(L[np.ix_(pops, pops)], axis=0) == 0)
    assert L[relax.superindex(1, 3, N), relax.superindex(1, 3, N)] == -0.2


def test_ld_acts_on_column_stacked_states():
    # decay 2 -> 1 empties level 2 into level 1 and damps the coherence
    gamma = np.array([[0, 1.0], [0, 0]])
    Gd = np.array([[0, 0.5], [0.5, 0]])
    L = relax.build_LD(RelaxationRates(2, gamma, Gamma_d=Gd))
    rho = np.array([[0.25, 0.1], [0.1, 0.75]])
    drho = (L @ rho.reshape(-1, order="F")).reshape(2, 2, order="F")
    assert np.allclose(drho, [[0.75, -0.05], [-0.05, -0.75]])


def test_rate_validation():
    with pytest.raises(DomainError):
        RelaxationRates(2, [[0, -1], [0, 0]])
    with pytest.raises(DomainError):
        RelaxationRates(2, np.zeros((2, 2)), Gamma_d=[[0, 1], [2, 0]])
    with pytest.raises(DomainError):
        relax.cp_constraints_n4({**EQUAL, "12": -0.1})
    with pytest.raises(DomainError):
        relax.b_matrix({"12": 1})
    with pytest.raises(DomainError):
        relax.symmetric_from_pairs({"15": 1}, 4)


def test_gamma_tot_fixtures():
    assert relax.gamma_tot(dict.fromkeys(relax.PAIRS4, 1)) == 3
    assert relax.gamma_tot(np.zeros(6)) == 0
    assert relax.gamma_tot(OPPOSITE) == 1


def test_b_matrix_fixtures():
    assert np.allclose(relax.b_matrix(EQUAL), 0.7 * np.eye(3))
    assert relax.b_matrix(OPPOSITE)[0, 0] == -1
    assert not relax.b_matrix(np.zeros((4, 4))).any()


def test_b_matrix_input_forms():
    M = relax.symmetric_from_pairs({"12": 1, "13": 2, "14": 3, "23": 4, "24": 5, "34": 6}, 4)
    assert np.array_equal(relax.b_matrix(M), relax.b_matrix([1, 2, 3, 4, 5, 6]))


def test_equal_rates_pass():
    report = relax.cp_constraints_n4(EQUAL)
    assert report.verdict and all(report.diag_ok)
    assert (report.g12, report.g23, report.g13) == pytest.approx((0, 0, 0))
    assert relax.printed_route_verdict(report)


def test_opposite_rates_fail_at_b11():
    report = relax.cp_constraints_n4(OPPOSITE)
    assert not report.verdict
    assert report.b[0, 0] == -1 and report.diag_ok == (False, True, True)
    assert report.inequality_values["b11"] < 0
    assert not relax.printed_route_verdict(report)


def test_zero_rates_degenerate_branch():
    report = relax.cp_constraints_n4(np.zeros(6))
    assert report.verdict and report.notes
    assert (report.g12, report.g23, report.g13) == (0, 0, 0)


@settings(max_examples=200, deadline=None)
@given(rates6)
def test_printed_identities(values):
    assert relax.inequality_identity_check(values)
    B = relax.b_matrix(values)
    ineq = relax.printed_inequalities(values)
    assert np.allclose([ineq["b11"], ineq["b22"], ineq["b33"]], 2 * np.diag(B))
    assert ineq["g13"] == pytest.approx(np.linalg.det(B), abs=1e-9 * max(1, np.max(np.abs(B))) ** 3)


@settings(max_examples=300, deadline=None)
@given(rates6)
def test_verdict_matches_eigenvalues(values):
    report = relax.cp_constraints_n4(values)
    assert report.verdict == positivity.check_p2_eigen(report.b).is_psd
    assert "parameter route and eigenvalue route disagree" not in report.notes


@settings(max_examples=300, deadline=None)
@given(rates6)
def test_printed_route_agrees_off_the_boundary(values):
    # the determinant condition scales like the product of the eigenvalues, so
    # it cannot resolve tolerance-sized negative eigenvalues next to small ones
    report = relax.cp_constraints_n4(values)
    B = report.b
    lam = np.linalg.eigvalsh(B)[0]
    assume(abs(lam) > 1e-6 * max(1, np.linalg.norm(B, 2)))
    assert report.verdict == relax.printed_route_verdict(report)


def test_printed_route_on_random_draws(rng):
    for _ in range(500):
        report = relax.cp_constraints_n4(rng.uniform(0, 1, 6))
        assert report.verdict == relax.printed_route_verdict(report)


def test_zero_diagonal_with_coupling_is_not_positive():
    report = relax.cp_constraints_n4([0, 0, 0, 0, 1, 1])
    assert report.b[0, 0] == 0 and report.b[0, 1] != 0
    assert not report.verdict


def test_g12_is_scaled_off_diagonal():
    values = [1.0, 0.8, 0.9, 0.7, 0.6, 0.5]
    report = relax.cp_constraints_n4(values)
    B = report.b
    assert report.g12 == pytest.approx(B[0, 1] / np.sqrt(B[0, 0] * B[1, 1]))


def test_only_four_levels():
    relax.check_levels(4)
    with pytest.raises(CapacityError):
        relax.check_levels(5)
