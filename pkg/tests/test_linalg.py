import json

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from psdblk.errors import (
    DimensionMismatchError,
    InvalidMatrixError,
    NonpositiveExponentError,
    NotHermitianError,
    NotPsdError,
)
from psdblk.linalg import (
    abs_matrix,
    block_from_json,
    dumps,
    eig_hermitian_desc,
    matrix_from_json,
    matrix_power_psd,
    matrix_to_json,
    sqrt_psd,
    validate_block_psd,
)

from conftest import complex_gaussian, random_hermitian, random_psd

EXAMPLE_M = np.array([[1, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0], [1, 0, 0, 1]], dtype=complex)


def test_validate_identity_blocks():
    I = np.eye(2)
    M = validate_block_psd(I, np.zeros((2, 2)), I)
    assert (M.n, M.m) == (2, 2)
    assert np.linalg.eigvalsh(M.matrix)[0] == pytest.approx(1.0)


def test_validate_example_fixture(example):
    assert np.allclose(example.matrix, EXAMPLE_M)
    assert abs(np.linalg.eigvalsh(example.matrix)[0]) < 1e-15


def test_validate_rejects_non_psd_with_eigenvalue():
    # [[I, 2I], [2I, I]] reduces to [[1, 2], [2, 1]] per coordinate: eigenvalues 3 and -1
    reduced = np.linalg.eigvalsh(np.array([[1.0, 2.0], [2.0, 1.0]]))
    I = np.eye(2)
    with pytest.raises(NotPsdError) as info:
        validate_block_psd(I, 2 * I, I)
    assert info.value.eigenvalue == pytest.approx(reduced[0])
    assert reduced[0] == pytest.approx(-1.0)


def test_validate_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        validate_block_psd(np.eye(2), np.zeros((3, 2)), np.eye(2))


def test_validate_rejects_asymmetric_corner():
    with pytest.raises(NotHermitianError):
        validate_block_psd([[1, 1], [0, 1]], np.zeros((2, 1)), [[1]])


def test_validate_rejects_nan():
    with pytest.raises(InvalidMatrixError):
        validate_block_psd([[np.nan]], [[0]], [[1]])


def test_validate_symmetrizes_near_hermitian():
    A = np.array([[2.0, 1.0 + 1e-14], [1.0, 2.0]])
    M = validate_block_psd(A, np.zeros((2, 2)), np.eye(2))
    assert np.array_equal(M.A, M.A.conj().T)


@pytest.mark.parametrize(
    "Z, expected",
    [
        (np.diag([1.0, 3.0, 2.0]), [3, 2, 1]),
        (np.array([[0.0, 1.0], [1.0, 0.0]]), [1, -1]),
    ],
)
def test_eig_hermitian_desc_small(Z, expected):
    assert np.allclose(eig_hermitian_desc(Z).eigenvalues, expected)


def test_eig_example_matches_exact_spectrum():
    exact = sympy.Matrix(EXAMPLE_M.real.astype(int)).eigenvals()
    assert exact == {2: 1, 0: 3}
    assert np.allclose(eig_hermitian_desc(EXAMPLE_M).eigenvalues, [2, 0, 0, 0], atol=1e-14)


def test_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        eig_hermitian_desc([[0, 1], [0, 0]])


@given(st.integers(0, 2**32 - 1), st.integers(1, 8))
def test_eig_reconstruction(seed, n):
    Z = random_hermitian(np.random.default_rng(seed), n)
    spec = eig_hermitian_desc(Z)
    assert np.all(np.diff(spec.eigenvalues) <= 0)
    Q = spec.eigenvectors
    assert np.linalg.norm(Q.conj().T @ Q - np.eye(n)) < 1e-12
    assert np.linalg.norm(spec.reconstruct() - Z) <= 1e-10 * (1 + np.linalg.norm(Z))


def test_sqrt_trivial_cases():
    assert np.allclose(sqrt_psd(np.eye(3)), np.eye(3))
    assert np.allclose(sqrt_psd(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))


def test_sqrt_example_closed_form():
    # M = v v* with |v|^2 = 2, so sqrt(M) = M / sqrt(2)
    S = sqrt_psd(EXAMPLE_M)
    assert np.allclose(S, EXAMPLE_M / np.sqrt(2), atol=1e-14)
    assert np.allclose(S @ S, EXAMPLE_M, atol=1e-14)


def test_sqrt_rejects_indefinite():
    with pytest.raises(NotPsdError):
        sqrt_psd(np.diag([1.0, -0.5]))


def test_sqrt_clamps_tiny_negative():
    S = sqrt_psd(np.diag([1.0, -1e-13]))
    assert np.allclose(S, np.diag([1.0, 0.0]))


def test_power_trivial_cases():
    assert np.allclose(matrix_power_psd(np.eye(2), 17), np.eye(2))
    assert np.allclose(matrix_power_psd(np.diag([4.0, 1.0]), 0.5), np.diag([2.0, 1.0]))


def test_power_example_cube():
    # M^2 = 2M, hence M^3 = 4M with operator norm 8
    P = matrix_power_psd(EXAMPLE_M, 3)
    assert np.allclose(P, 4 * EXAMPLE_M, atol=1e-13)
    assert np.linalg.norm(P, 2) == pytest.approx(8.0, abs=1e-12)


def test_power_rejects_nonpositive_exponent():
    with pytest.raises(NonpositiveExponentError):
        matrix_power_psd(np.eye(2), 0)


@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.sampled_from([0.5, 2.0, 3.0]))
def test_power_roundtrip(seed, n, p):
    Z = random_psd(np.random.default_rng(seed), n)
    scale = 1 + np.linalg.norm(Z)
    assert np.linalg.norm(sqrt_psd(Z) @ sqrt_psd(Z) - Z) <= 1e-10 * scale
    assert np.linalg.norm(matrix_power_psd(Z, 1) - Z) <= 1e-10 * scale
    back = matrix_power_psd(matrix_power_psd(Z, p), 1 / p)
    assert np.linalg.norm(back - Z) <= 1e-8 * scale


@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_power_spectrum(seed, n):
    Z = random_psd(np.random.default_rng(seed), n)
    lam = np.linalg.eigvalsh(Z)[::-1]
    got = np.linalg.eigvalsh(matrix_power_psd(Z, 2.5))[::-1]
    assert np.allclose(got, np.clip(lam, 0, None) ** 2.5, rtol=1e-10, atol=1e-10 * lam[0] ** 2.5)


@given(st.integers(0, 2**32 - 1), st.integers(2, 10), st.data())
def test_any_gram_split_is_valid(seed, size, data):
    G = complex_gaussian(np.random.default_rng(seed), (size, size))
    M = G.conj().T @ G
    n = data.draw(st.integers(1, size - 1))
    validate_block_psd(M[:n, :n], M[:n, n:], M[n:, n:])


def test_abs_matrix_of_skew_example():
    X = np.array([[0, 1], [0, 0]])
    assert np.allclose(abs_matrix(X - X.T), np.eye(2))


def test_matrix_json_roundtrip(rng):
    Z = complex_gaussian(rng, (3, 2))
    obj = json.loads(dumps(matrix_to_json(Z)))
    assert obj["rows"] == 3 and obj["cols"] == 2 and len(obj["data"]) == 6
    assert np.array_equal(matrix_from_json(obj), Z)


def test_block_json_roundtrip(example):
    again = block_from_json(json.loads(dumps(example.to_json())))
    assert again == example
    assert again.fingerprint() == example.fingerprint()


def test_block_is_immutable(example):
    with pytest.raises(ValueError):
        example.A[0, 0] = 5
