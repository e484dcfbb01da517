import numpy as np
import pytest
from hypothesis import given, strategies as st

from qle.errors import NotSquareError
from qle.matrixio import dumps_matrix, loads_matrix, parse_complex, read_matrix, write_matrix


@pytest.mark.parametrize(
    "token, value",
    [
        ("1", 1 + 0j),
        ("-2.5", -2.5 + 0j),
        ("i", 1j),
        ("-i", -1j),
        ("+i", 1j),
        ("3i", 3j),
        ("1+2i", 1 + 2j),
        ("1-i", 1 - 1j),
        ("1e-3-4.5e2i", 1e-3 - 450j),
        ("0.5+0.25j", 0.5 + 0.25j),
    ],
)
def test_parse_complex(token, value):
    assert parse_complex(token) == value


def test_parse_complex_rejects_garbage():
    with pytest.raises(ValueError):
        parse_complex("1+2k")


def test_loads_pauli_y():
    m = loads_matrix("2\n0 -i\ni 0\n")
    np.testing.assert_array_equal(m, [[0, -1j], [1j, 0]])


def test_ragged_rows_rejected():
    with pytest.raises(NotSquareError):
        loads_matrix("2\n0 1\n1\n")
    with pytest.raises(NotSquareError):
        loads_matrix("3\n0 1 2\n1 0 2\n")


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@given(st.lists(st.tuples(finite, finite), min_size=9, max_size=9))
def test_roundtrip_is_lossless(pairs):
    m = np.array([complex(a, b) for a, b in pairs]).reshape(3, 3)
    back = loads_matrix(dumps_matrix(m))
    np.testing.assert_array_equal(back, m)


def test_file_roundtrip(tmp_path):
    m = np.array([[1.0, 2 - 1j / 3], [2 + 1j / 3, -np.pi]])
    path = tmp_path / "g.mat"
    write_matrix(path, m)
    text = path.read_text()
    assert text.splitlines()[0] == "2"
    assert "0.33333333333333331" in text
    np.testing.assert_array_equal(read_matrix(path), m)
