import json

import numpy as np
import pytest

from psdkit import channel, io, schur
from psdkit.errors import DomainError

from conftest import random_matrix


def test_matrix_json_round_trip_is_bit_exact(rng):
    M = random_matrix(rng, 3, 4) * 1e-7 + 1 / 3
    text = json.dumps(io.matrix_to_obj(M))
    back = io.matrix_from_obj(json.loads(text))
    assert back.shape == (3, 4)
    assert np.array_equal(back, M)


def test_matrix_object_layout():
    obj = io.matrix_to_obj([[1, 2j]])
    assert obj == {"rows": 1, "cols": 2, "data": [[[1.0, 0.0], [0.0, 2.0]]]}


def test_plain_lists_accepted():
    assert np.array_equal(io.matrix_from_obj([[1, 0], [0, 2]]), np.diag([1, 2]))


@pytest.mark.parametrize("bad", [
    {"rows": 2, "cols": 2, "data": [[[1, 0], [0, 0]]]},
    {"rows": 1, "cols": 1},
    {"rows": 1, "cols": 1, "data": [[[1, 2, 3]]]},
    "matrix",
])
def test_malformed_matrix(bad):
    with pytest.raises(DomainError):
        io.matrix_from_obj(bad)


def test_csv_round_trip(rng):
    M = random_matrix(rng, 3)
    text = io.matrix_to_csv(M)
    assert len(text.splitlines()) == 3
    assert np.array_equal(io.matrix_from_csv(text), M)


def test_csv_tokens():
    assert io.format_complex(1.5 - 2j) == "1.5-2.0j"
    assert io.format_complex(complex(0, 0.25)) == "0.0+0.25j"
    with pytest.raises(DomainError):
        io.matrix_from_csv("1+0j,abc\n")


def test_params_round_trip(rng):
    p = schur.random_parameters(3, 2, rng)
    obj = json.loads(io.dumps(io.params_to_obj(p)))
    assert {(g["k"], g["j"]) for g in obj["gamma"]} == {(1, 2), (1, 3), (2, 3)}
    q = io.params_from_obj(obj)
    assert np.array_equal(schur.reconstruct(q), schur.reconstruct(p))


def test_params_validation():
    with pytest.raises(DomainError):
        io.params_from_obj({"d": 2, "L": [[[1]]]})
    with pytest.raises(DomainError):
        io.params_from_obj({"L": []})


def test_kraus_round_trip(rng):
    K = channel.random_kraus(2, 3, 2, rng)
    back = io.kraus_from_obj(json.loads(io.dumps(io.kraus_to_obj(K))))
    assert (back.d_in, back.d_out) == (2, 3)
    assert all(np.array_equal(a, b) for a, b in zip(back.operators, K.operators))


def test_read_matrix_by_suffix(tmp_path):
    (tmp_path / "m.csv").write_text("1+0j,0+0j\n0+0j,2+0j\n")
    (tmp_path / "m.json").write_text(json.dumps([[1, 0], [0, 2]]))
    (tmp_path / "bad.json").write_text("{")
    assert np.array_equal(io.read_matrix(tmp_path / "m.csv"), np.diag([1, 2]))
    assert np.array_equal(io.read_matrix(tmp_path / "m.json"), np.diag([1, 2]))
    with pytest.raises(DomainError):
        io.read_matrix(tmp_path / "bad.json")


def test_dumps_plain_types():
    text = io.dumps({"a": np.float64(0.5), "b": np.bool_(True), "c": np.arange(2), "z": 1j})
    assert json.loads(text) == {"a": 0.5, "b": True, "c": [0, 1], "z": [0.0, 1.0]}
