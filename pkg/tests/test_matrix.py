import numpy as np
import pytest

from ssnmf import matrix
from ssnmf.exceptions import ConfigError, ParseError, ShapeError


def test_as_matrix_coerces_nested_lists():
    m = matrix.as_matrix([[1, 2], [3, 4]])
    assert m.dtype == np.float64
    assert m.flags["C_CONTIGUOUS"]
    assert m.shape == (2, 2)


def test_as_matrix_rejects_wrong_ndim():
    with pytest.raises(ShapeError):
        matrix.as_matrix([1.0, 2.0])
    with pytest.raises(ShapeError):
        matrix.as_matrix(np.zeros((2, 2, 2)))


def test_check_nonnegative_names_the_entry():
    m = np.array([[1.0, 2.0], [3.0, -0.5]])
    with pytest.raises(ShapeError) as err:
        matrix.check_nonnegative(m, "w")
    assert "w" in str(err.value)
    assert "(1, 1)" in str(err.value)


def test_check_nonnegative_passes_zero():
    m = np.zeros((2, 3))
    assert matrix.check_nonnegative(m) is m


def test_hadamard_values():
    got = matrix.hadamard([[1, 2], [3, 4]], [[5, 6], [7, 8]])
    assert np.array_equal(got, [[5, 12], [21, 32]])


def test_hadamard_shape_mismatch():
    with pytest.raises(ShapeError):
        matrix.hadamard([[1, 2]], [[1], [2]])


def test_safe_divide_guards_zero_denominator():
    got = matrix.safe_divide([[1.0]], [[0.0]], eps=0.5)
    assert got[0, 0] == pytest.approx(2.0)
    got = matrix.safe_divide([[6.0]], [[2.0]], eps=1.0)
    assert got[0, 0] == pytest.approx(2.0)


def test_safe_divide_default_eps_is_finite():
    got = matrix.safe_divide([[1.0]], [[0.0]])
    assert np.isfinite(got[0, 0])
    assert got[0, 0] == pytest.approx(1e10)


def test_safe_divide_rejects_bad_eps():
    with pytest.raises(ConfigError):
        matrix.safe_divide([[1.0]], [[1.0]], eps=0.0)
    with pytest.raises(ConfigError):
        matrix.safe_divide([[1.0]], [[1.0]], eps=-1e-3)


def test_matmul_against_triple_loop():
    rng = np.random.default_rng(11)
    a = rng.random((3, 4))
    b = rng.random((4, 2))
    want = np.zeros((3, 2))
    for i in range(3):
        for j in range(2):
            for k in range(4):
                want[i, j] += a[i, k] * b[k, j]
    got = matrix.matmul(a, b)
    assert np.allclose(got, want, rtol=0, atol=1e-14)


def test_matmul_inner_dim_mismatch():
    with pytest.raises(ShapeError):
        matrix.matmul(np.zeros((2, 3)), np.zeros((2, 3)))


def test_transpose():
    t = matrix.transpose([[1, 2, 3], [4, 5, 6]])
    assert t.shape == (3, 2)
    assert t.flags["C_CONTIGUOUS"]
    assert np.array_equal(t, [[1, 4], [2, 5], [3, 6]])


def test_csv_roundtrip_is_exact(tmp_path):
    rng = np.random.default_rng(3)
    m = rng.random((4, 5)) * np.array([1e-17, 1e-3, 1.0, 1e3, 1e17])
    path = tmp_path / "m.csv"
    matrix.write_csv(path, m)
    back = matrix.read_csv(path)
    # repr round-trips float64 exactly
    assert np.array_equal(back, m)


def test_read_csv_skips_blank_lines(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("1,2\n\n3,4\n")
    assert np.array_equal(matrix.read_csv(path), [[1, 2], [3, 4]])


def test_read_csv_ragged_rows(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("1,2\n3\n")
    with pytest.raises(ParseError) as err:
        matrix.read_csv(path)
    assert "line 2" in str(err.value)


def test_read_csv_non_numeric(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("1,spam\n")
    with pytest.raises(ParseError) as err:
        matrix.read_csv(path)
    assert "line 1" in str(err.value)


def test_read_csv_empty_file(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("")
    with pytest.raises(ParseError):
        matrix.read_csv(path)
