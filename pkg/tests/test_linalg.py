import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from colsel.errors import (
    DidNotConvergeError,
    IndexInTError,
    IndexOutOfRangeError,
    NoRootInIntervalError,
    NonFiniteEntryError,
    NotSymmetricError,
    PoleProximityError,
    TooFewColumnsError,
    ZeroColumnError,
)
from colsel import linalg
from colsel.linalg import (
    ColumnMatrix,
    SecularFunction,
    coherence,
    cross_gram_norm,
    normalize_columns,
    secular_eval,
    secular_smallest_root,
    smallest_singular_value,
    sym_eigen,
)
from colsel.harness import gen_gaussian

from conftest import random_psd, random_unit_matrix

R2 = 1 / math.sqrt(2)


# normalize_columns

def test_normalize_identity_unchanged():
    X = normalize_columns(np.eye(2))
    assert np.array_equal(X.data, np.eye(2))


def test_normalize_three_four():
    X = normalize_columns([[3.0], [4.0]])
    np.testing.assert_allclose(X.column(0), [0.6, 0.8], rtol=0, atol=1e-15)


def test_normalize_random_norms(rng):
    X = normalize_columns(rng.standard_normal((5, 8)))
    np.testing.assert_allclose(np.linalg.norm(X.data, axis=0), 1.0, atol=1e-12)


def test_normalize_preserves_direction(rng):
    raw = rng.standard_normal((6, 4))
    X = normalize_columns(raw)
    for j in range(4):
        cos = raw[:, j] @ X.column(j) / np.linalg.norm(raw[:, j])
        assert cos == pytest.approx(1.0, abs=1e-14)


def test_normalize_zero_column():
    with pytest.raises(ZeroColumnError) as info:
        normalize_columns([[1.0, 0.0], [0.0, 1e-16]])
    assert info.value.details["index"] == 1


@pytest.mark.parametrize("bad", [math.nan, math.inf])
def test_normalize_nonfinite(bad):
    with pytest.raises(NonFiniteEntryError):
        normalize_columns([[1.0, bad], [0.0, 1.0]])


def test_column_matrix_is_read_only():
    X = normalize_columns(np.eye(3))
    with pytest.raises(ValueError):
        X.data[0, 0] = 2.0
    assert X.entries.tolist() == np.eye(3).ravel().tolist()


# coherence

def test_coherence_identity():
    assert coherence(normalize_columns(np.eye(3))) == 0.0


def test_coherence_three_vectors():
    X = normalize_columns([[1.0, 0.0, R2], [0.0, 1.0, R2]])
    assert coherence(X) == pytest.approx(R2, abs=1e-15)


def test_coherence_gaussian_range():
    # range established by Monte Carlo over 200 seeds: [0.350, 0.474]
    for seed in range(50):
        assert 0.25 <= coherence(gen_gaussian(100, 200, seed)) <= 0.65


def test_coherence_too_few_columns():
    with pytest.raises(TooFewColumnsError):
        coherence(normalize_columns([[1.0], [2.0]]))


def test_coherence_blockwise_matches_full(rng, monkeypatch):
    X = random_unit_matrix(rng, 7, 40)
    full = coherence(X)
    monkeypatch.setattr(linalg, "COHERENCE_BLOCK", 50)
    assert coherence(X) == full


def test_submatrix_coherence_monotone(rng):
    X = random_unit_matrix(rng, 8, 20)
    mu = coherence(X)
    for _ in range(50):
        T = rng.choice(20, size=int(rng.integers(2, 20)), replace=False)
        assert coherence(ColumnMatrix(X.submatrix(T))) <= mu


# cross_gram_norm

def test_cross_gram_orthogonal():
    assert cross_gram_norm(normalize_columns(np.eye(3)), [0], 1) == 0.0


def test_cross_gram_single():
    X = normalize_columns([[1.0, R2], [0.0, R2]])
    assert cross_gram_norm(X, [0], 1) == pytest.approx(R2, abs=1e-15)


def test_cross_gram_matches_explicit(rng):
    X = random_unit_matrix(rng, 6, 10)
    T = [2, 5, 7]
    explicit = math.sqrt(sum(float(X.column(k) @ X.column(3)) ** 2 for k in T))
    assert cross_gram_norm(X, T, 3) == pytest.approx(explicit, rel=1e-13)


def test_cross_gram_bounded_by_coherence(rng):
    X = random_unit_matrix(rng, 5, 15)
    mu = coherence(X)
    for _ in range(200):
        idx = rng.permutation(15)
        s = int(rng.integers(1, 14))
        T, j = idx[:s], idx[s]
        assert cross_gram_norm(X, T, j) ** 2 <= s * mu**2 + 1e-12


def test_cross_gram_errors():
    X = normalize_columns(np.eye(3))
    with pytest.raises(IndexOutOfRangeError):
        cross_gram_norm(X, [0], 3)
    with pytest.raises(IndexOutOfRangeError):
        cross_gram_norm(X, [-1], 1)
    with pytest.raises(IndexInTError):
        cross_gram_norm(X, [0, 1], 1)


# sym_eigen

def test_eigen_diagonal():
    spec = sym_eigen(np.diag([3.0, 1.0, 2.0]))
    assert spec.eigenvalues.tolist() == [3.0, 2.0, 1.0]


def test_eigen_two_by_two():
    spec = sym_eigen([[1.0, R2], [R2, 1.0]])
    # (trace +/- gap) / 2 with trace 2 and gap 2 / sqrt(2)
    np.testing.assert_allclose(spec.eigenvalues, [1 + R2, 1 - R2], atol=1e-15)


def test_eigen_known_spectrum(rng):
    Q, _ = np.linalg.qr(rng.standard_normal((5, 5)))
    A = Q @ np.diag([5.0, 4.0, 3.0, 2.0, 1.0]) @ Q.T
    spec = sym_eigen(A)
    np.testing.assert_allclose(spec.eigenvalues, [5, 4, 3, 2, 1], atol=1e-12)


@pytest.mark.parametrize("n", [3, 8, 25])
def test_eigen_invariants(rng, n):
    A = random_psd(rng, n, rank=max(1, n // 2))
    spec = sym_eigen(A)
    assert np.all(np.diff(spec.eigenvalues) <= 0)
    assert np.max(np.abs(spec.reconstruct() - A)) <= 1e-8
    assert np.max(np.abs(spec.eigenvectors.T @ spec.eigenvectors - np.eye(n))) <= 1e-8
    lead = np.argmax(np.abs(spec.eigenvectors), axis=0)
    assert np.all(spec.eigenvectors[lead, np.arange(n)] > 0)


def test_eigen_deterministic(rng):
    A = random_psd(rng, 10)
    a, b = sym_eigen(A), sym_eigen(A.copy())
    assert a.eigenvalues.tobytes() == b.eigenvalues.tobytes()
    assert a.eigenvectors.tobytes() == b.eigenvectors.tobytes()


def test_eigen_not_symmetric():
    with pytest.raises(NotSymmetricError):
        sym_eigen([[1.0, 0.5], [0.4, 1.0]])
    with pytest.raises(NotSymmetricError):
        sym_eigen(np.ones((2, 3)))


def test_eigen_did_not_converge(rng, monkeypatch):
    monkeypatch.setattr(linalg, "JACOBI_MAX_SWEEPS", 1)
    with pytest.raises(DidNotConvergeError) as info:
        sym_eigen(random_psd(rng, 8))
    assert info.value.details["iterations"] == 1


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, (6, 6), elements=st.floats(-10, 10)))
def test_eigen_property_matches_lapack(B):
    A = B + B.T
    spec = sym_eigen(A)
    scale = max(1.0, np.abs(A).max())
    np.testing.assert_allclose(spec.eigenvalues[::-1], np.linalg.eigvalsh(A), atol=1e-11 * scale)


# secular function

def _rank_one_setup(rng, n, rank):
    A = random_psd(rng, n, rank)
    A /= np.max(np.linalg.eigvalsh(A))
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    return A, v


def test_secular_zero_weights():
    f = SecularFunction([1.0, 0.3], [0.0, 0.0])
    for x in (-2.0, 0.5, 7.0):
        assert secular_eval(f, x) == 1.0


def test_secular_hand_value():
    f = SecularFunction([1.0, 0.0], [0.5, 0.5])
    assert secular_eval(f, 0.5) == pytest.approx(1.0, abs=1e-15)
    assert f(0.5) == secular_eval(f, 0.5)


def test_secular_pole_guard():
    f = SecularFunction([1.0, 0.0], [0.5, 0.5])
    with pytest.raises(PoleProximityError):
        secular_eval(f, 1.0 + 1e-14)


def test_secular_rejects_negative_weight():
    with pytest.raises(ValueError):
        SecularFunction([1.0], [-0.1])


def test_weight_conservation(rng):
    for _ in range(20):
        A, v = _rank_one_setup(rng, 7, 3)
        v *= rng.uniform(0.5, 2.0)
        f = SecularFunction.from_rank_one(sym_eigen(A), v)
        assert f.total_weight == pytest.approx(v @ v, abs=1e-10)


def test_characteristic_polynomial_identity(rng):
    for _ in range(10):
        A, v = _rank_one_setup(rng, 4, 4)
        spec = sym_eigen(A)
        grown = sym_eigen(A + np.outer(v, v)).eigenvalues
        f = SecularFunction.from_rank_one(spec, v)
        for x in rng.uniform(-1.0, 3.0, size=5):
            lhs = np.prod(x - grown)
            rhs = np.prod(x - spec.eigenvalues) * secular_eval(f, x)
            assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-14)


def test_interlacing(rng):
    for _ in range(40):
        n = int(rng.integers(2, 9))
        A, v = _rank_one_setup(rng, n, int(rng.integers(1, n + 1)))
        lam = sym_eigen(A).eigenvalues
        mu = sym_eigen(A + np.outer(v, v)).eigenvalues
        upper = np.concatenate([[np.inf], lam[:-1]])
        assert np.all(mu >= lam - 1e-9)
        assert np.all(mu <= upper + 1e-9)


def test_root_orthogonal_update():
    # all weight on the zero eigenvalue: f(x) = 1 - 1/x
    f = SecularFunction([2.0, 0.0], [0.0, 1.0])
    assert secular_smallest_root(f) == pytest.approx(1.0, abs=1e-12)


def test_root_two_by_two():
    spec = sym_eigen(np.diag([1.0, 0.0]))
    f = SecularFunction.from_rank_one(spec, [R2, R2])
    # smaller root of x^2 - 2x + 1/2
    assert secular_smallest_root(f) == pytest.approx(1 - R2, abs=1e-12)


def test_root_matches_grown_gram(rng):
    for _ in range(20):
        X = random_unit_matrix(rng, 10, 30)
        T = list(rng.choice(30, size=6, replace=False))
        j = T.pop()
        XT = X.submatrix(T)
        f = SecularFunction.from_rank_one(sym_eigen(XT @ XT.T), X.column(j))
        root = secular_smallest_root(f)
        grown = sym_eigen(X.submatrix(T + [j]).T @ X.submatrix(T + [j])).eigenvalues
        assert root == pytest.approx(grown[5], abs=1e-8)
        assert abs(secular_eval(f, root)) <= 1e-10


def test_root_absent_when_v_in_range():
    f = SecularFunction([1.0, 0.0], [1.0, 0.0])
    with pytest.raises(NoRootInIntervalError):
        secular_smallest_root(f)


def test_root_explicit_interval_with_inner_pole():
    f = SecularFunction([2.0, 1.0, 0.0], [0.3, 0.3, 0.4])
    with pytest.raises(NoRootInIntervalError):
        secular_smallest_root(f, (0.0, 3.0))
    r = secular_smallest_root(f, (1.0, 2.0))
    assert 1.0 < r < 2.0 and abs(f(r)) <= 1e-10


# smallest_singular_value

def test_sigma_min_orthonormal():
    assert smallest_singular_value(normalize_columns(np.eye(3)), [0, 1]) == pytest.approx(1.0)


def test_sigma_min_two_columns():
    X = normalize_columns([[1.0, R2], [0.0, R2]])
    G = X.data.T @ X.data
    expected = math.sqrt(min(np.linalg.eigvalsh(G)))
    assert smallest_singular_value(X, [0, 1]) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(0.54120, abs=1e-5)


def test_sigma_min_duplicate():
    X = normalize_columns(np.eye(3))
    assert smallest_singular_value(X, [1, 1]) <= 1e-8


def test_sigma_min_index_error():
    with pytest.raises(IndexOutOfRangeError):
        smallest_singular_value(normalize_columns(np.eye(3)), [0, 5])
