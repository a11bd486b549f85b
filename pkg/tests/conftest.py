import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def random_matrix(rng, rows, cols=None):
    cols = rows if cols is None else cols
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_hermitian(rng, d):
    M = random_matrix(rng, d)
    return (M + M.conj().T) / 2


def random_psd(rng, d, rank=None):
    M = random_matrix(rng, rank or d, d)
    return M.conj().T @ M
