import numpy as np
import pytest

from mlqmc.ortho import apply_chain, apply_chain_transpose
from mlqmc.regress import (
    RegressionSpec,
    build_chain,
    capture_ratio,
    capture_report,
    loglinear_regression_vector,
)


def chain_matrix(chain):
    return apply_chain(chain, np.eye(chain.n)).T


def dense_algorithm(W):
    """Algorithm run with a dense U and expectations of linear h_k evaluated exactly.

    For h_k(x) = w_k^T x, E(X h_k(U X)) = U^T w_k.
    """
    m, n = W.shape
    U = np.eye(n)
    pivot = 0
    for w in W:
        a = U.T @ w
        a[:pivot] = 0.0
        if np.linalg.norm(a) <= 1e-12 * np.linalg.norm(w):
            continue
        e = np.zeros(n)
        e[pivot] = 1.0
        v = e - a / np.linalg.norm(a)
        if np.linalg.norm(v) > 1e-12:
            H = np.eye(n) - 2 * np.outer(v, v) / (v @ v)
            U = U @ H
        pivot += 1
    return U


def test_aligned_vector_gives_empty_chain():
    chain = build_chain(RegressionSpec([[1.0, 0.0, 0.0]]))
    assert len(chain) == 0


def test_single_vector_3_4():
    a = np.array([3.0, 4.0])
    chain = build_chain(RegressionSpec([a]))
    assert len(chain) == 1
    np.testing.assert_allclose(apply_chain_transpose(chain, a), [5.0, 0.0], atol=1e-12)


def test_colinear_vectors_are_skipped():
    chain = build_chain(RegressionSpec([[1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]))
    assert len(chain) == 0
    chain = build_chain(RegressionSpec([[1.0, 2.0, 0.0], [-2.0, -4.0, 0.0]]))
    assert len(chain) == 1
    assert chain.reflections[0].pivot == 0


def test_skip_does_not_advance_pivot():
    rng = np.random.default_rng(0)
    a1 = rng.normal(size=5)
    a3 = rng.normal(size=5)
    chain = build_chain(RegressionSpec([a1, 2 * a1, a3]))
    assert [r.pivot for r in chain.reflections] == [0, 1]
    r3 = apply_chain_transpose(chain, a3)
    np.testing.assert_allclose(r3[2:], 0.0, atol=1e-12)


def test_spec_validation():
    with pytest.raises(ValueError):
        RegressionSpec(np.ones((3, 2)))
    with pytest.raises(ValueError):
        RegressionSpec([[1.0, np.nan]])


@pytest.mark.parametrize("seed", range(10))
def test_triangularization_matches_qr(seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(8, 3))
    chain = build_chain(RegressionSpec(A.T))
    R = apply_chain_transpose(chain, A.T).T
    np.testing.assert_allclose(R[3:], 0.0, atol=1e-10 * np.abs(A).max())
    for k in range(3):
        np.testing.assert_allclose(R[k + 1 :, k], 0.0, atol=1e-10 * np.linalg.norm(A[:, k]))
    _, R_ref = np.linalg.qr(A)
    np.testing.assert_allclose(np.abs(R[:3]), np.abs(R_ref), atol=1e-10)
    # this sign convention puts a positive diagonal on R
    assert np.all(np.diag(R[:3]) > 0)


@pytest.mark.parametrize("seed", range(5))
def test_update_identity_against_dense_algorithm(seed):
    rng = np.random.default_rng(100 + seed)
    W = rng.normal(size=(3, 12))
    chain = build_chain(RegressionSpec(W))
    np.testing.assert_allclose(chain_matrix(chain), dense_algorithm(W), atol=1e-12)


def test_dimension_reduction():
    rng = np.random.default_rng(7)
    n, m = 20, 3
    W = rng.normal(size=(m, n))

    def f(x):
        y = x @ W.T
        return np.sin(y[..., 0]) * np.exp(0.1 * y[..., 1]) + y[..., 2] ** 2

    chain = build_chain(RegressionSpec(W))
    base = rng.normal(size=n)
    X = np.tile(base, (50, 1))
    X[:, m:] = rng.normal(size=(50, n - m))
    vals = f(apply_chain(chain, X))
    assert np.ptp(vals) < 1e-10 * max(1.0, abs(vals[0]))


def test_capture_ratio():
    w = np.array([1.0, -2.0, 0.5])
    assert capture_ratio(w, w @ w) == pytest.approx(1.0)
    assert capture_ratio([3.0, 4.0], 50.0) == 0.5
    with pytest.raises(ValueError):
        capture_ratio([1.0], 0.0)


def test_capture_report_linear_inner_function():
    w = np.array([0.3, -1.2, 0.7])
    X = np.random.default_rng(1).standard_normal((200_000, 3))
    rep = capture_report(lambda x: (x @ w + 2.0)[None, :], w[None, :], X)
    assert rep.ratios[0] == pytest.approx(1.0, abs=0.01)
    assert rep.intercepts[0] == pytest.approx(2.0, abs=0.01)


def test_loglinear_one_dimensional():
    c, d = 0.7, -0.3
    a = loglinear_regression_vector([1.0], [[c]], [[d]])
    assert a[0] == pytest.approx(c * np.exp(c**2 / 2 + d), rel=1e-15)
    np.testing.assert_array_equal(loglinear_regression_vector([1.0, 2.0], np.zeros((2, 3)), np.ones((2, 3))), 0.0)


def test_loglinear_overflow_reports_index():
    with pytest.raises(OverflowError, match="k=1"):
        loglinear_regression_vector([1.0, 1.0], [[0.0], [50.0]], [[0.0], [0.0]])


def test_loglinear_against_mc():
    rng = np.random.default_rng(2)
    w = np.array([0.6, 1.1])
    C = rng.normal(scale=0.4, size=(2, 2))
    D = rng.normal(scale=0.2, size=(2, 2))
    a = loglinear_regression_vector(w, C, D)
    X = rng.standard_normal((10**6, 2))
    h = np.exp(X @ C.T + D.sum(axis=1)) @ w
    samples = X * h[:, None]
    est = samples.mean(axis=0)
    se = samples.std(axis=0, ddof=1) / np.sqrt(len(X))
    assert np.all(np.abs(est - a) < 3 * se)
