import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from herdisc.errors import InvalidMatrix, InvalidParameter, NotPSD
from herdisc.instances import sylvester_hadamard
from herdisc.linalg import (
    full_rank_reduce,
    nuclear_norm,
    psd_sqrt,
    sigma_min,
    simplex_project,
    spectral_norm,
    spectrum,
)
from oracles import bisect_simplex

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
small_matrix = st.tuples(st.integers(1, 6), st.integers(1, 6)).flatmap(
    lambda s: arrays(np.float64, s, elements=finite)
)


def test_spectrum_diagonal():
    np.testing.assert_allclose(spectrum(np.diag([3.0, 4.0])).singular_values, [4, 3])


def test_spectrum_h2():
    np.testing.assert_allclose(spectrum(sylvester_hadamard(2)).singular_values, [np.sqrt(2)] * 2)


def test_spectrum_reconstructs(rng):
    A = rng.standard_normal((5, 3))
    d = spectrum(A)
    assert np.linalg.norm(d.reconstruct() - A) <= 1e-8 * np.linalg.norm(A)
    np.testing.assert_allclose(d.left_vectors.T @ d.left_vectors, np.eye(3), atol=1e-10)
    np.testing.assert_allclose(d.right_vectors.T @ d.right_vectors, np.eye(3), atol=1e-10)
    assert np.all(np.diff(d.singular_values) <= 0)


def test_spectrum_rejects_nonfinite():
    with pytest.raises(InvalidMatrix):
        spectrum(np.array([[1.0, np.nan]]))


@pytest.mark.parametrize("M, expected", [(np.diag([3.0, 4.0]), 7.0), (sylvester_hadamard(4), 8.0), (np.zeros((2, 3)), 0.0)])
def test_nuclear_norm_values(M, expected):
    assert nuclear_norm(M) == pytest.approx(expected, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(small_matrix, st.sampled_from([0.5, -2.0, 10.0]))
def test_nuclear_norm_ordering_and_scaling(M, c):
    nuc = nuclear_norm(M)
    assert nuc >= spectral_norm(M) - 1e-9
    assert nuc >= np.linalg.norm(M) - 1e-9
    assert nuclear_norm(c * M) == pytest.approx(abs(c) * nuc, rel=1e-9, abs=1e-9)


def test_spectrum_invariant_under_signed_permutations(rng):
    A = rng.standard_normal((4, 6))
    B = (A * rng.choice([-1, 1], 6))[:, rng.permutation(6)]
    B = (B.T * rng.choice([-1, 1], 4)).T[rng.permutation(4)]
    np.testing.assert_allclose(spectrum(A).singular_values, spectrum(B).singular_values, atol=1e-12)


def test_psd_sqrt_examples():
    np.testing.assert_allclose(psd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-14)
    np.testing.assert_allclose(psd_sqrt(np.eye(3)), np.eye(3), atol=1e-14)
    # eigenvalues 3 on (1,1)/sqrt2 and 1 on (1,-1)/sqrt2
    u, v = np.array([1.0, 1.0]) / np.sqrt(2), np.array([1.0, -1.0]) / np.sqrt(2)
    expected = np.sqrt(3) * np.outer(u, u) + np.outer(v, v)
    np.testing.assert_allclose(psd_sqrt(np.array([[2.0, 1.0], [1.0, 2.0]])), expected, atol=1e-14)


@pytest.mark.parametrize("n", [1, 5, 20])
def test_psd_sqrt_squares_back(rng, n):
    G = rng.standard_normal((n, n))
    M = G @ G.T
    Y = psd_sqrt(M)
    np.testing.assert_allclose(Y, Y.T)
    assert np.linalg.norm(Y @ Y - M) <= 1e-8 * (1 + np.linalg.norm(M))


def test_psd_sqrt_clamps_tiny_negative():
    M = np.diag([1.0, -1e-9])
    np.testing.assert_allclose(psd_sqrt(M), np.diag([1.0, 0.0]))


def test_psd_sqrt_rejects_indefinite():
    with pytest.raises(NotPSD):
        psd_sqrt(np.diag([1.0, -0.1]))


def test_simplex_project_examples():
    np.testing.assert_allclose(simplex_project([0.5, 0.5]), [0.5, 0.5])
    np.testing.assert_allclose(simplex_project([2.0, 0.0]), [1.0, 0.0])
    w = simplex_project([0.8, 0.4, 0.1])
    np.testing.assert_allclose(w, bisect_simplex([0.8, 0.4, 0.1]), atol=1e-12)
    assert w.sum() == pytest.approx(1.0, abs=1e-15)


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, st.integers(1, 8), elements=finite))
def test_simplex_project_matches_bisection_and_is_idempotent(v):
    w = simplex_project(v)
    assert np.all(w >= 0) and w.sum() == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(w, bisect_simplex(v), atol=1e-9)
    np.testing.assert_allclose(simplex_project(w), w, atol=1e-12)


def test_simplex_project_beats_grid_in_dim3(rng):
    grid = [np.array([a, b, 1 - a - b]) for a in np.linspace(0, 1, 41) for b in np.linspace(0, 1, 41) if a + b <= 1 + 1e-12]
    for _ in range(10):
        v = rng.uniform(-1, 2, 3)
        w = simplex_project(v)
        best = min(np.linalg.norm(v - g) for g in grid)
        assert np.linalg.norm(v - w) <= best + 1e-12


def test_full_rank_reduce_keeps_full_rank_input():
    np.testing.assert_array_equal(full_rank_reduce(np.eye(3), 1e-6), np.eye(3))


def test_full_rank_reduce_zero_scalar():
    B = full_rank_reduce(np.zeros((1, 1)), 1e-6)
    assert 0 < abs(B[0, 0]) <= 1e-6


def test_full_rank_reduce_rank_one():
    A = np.ones((2, 2))
    B = full_rank_reduce(A, 1e-6)
    assert sigma_min(B.T) >= 1e-6 * max(1, spectral_norm(A)) * 1e-3
    assert np.max(np.abs(B - A)) <= 1e-6


def test_full_rank_reduce_appends_columns_and_is_deterministic():
    A = np.array([[3.0], [0.0]])
    B = full_rank_reduce(A, 1e-6)
    assert B.shape == (2, 2)
    np.testing.assert_array_equal(B[:, :1], A)
    np.testing.assert_array_equal(B, full_rank_reduce(A, 1e-6))


def test_full_rank_reduce_rejects_bad_delta():
    with pytest.raises(InvalidParameter):
        full_rank_reduce(np.eye(2), 0.0)
