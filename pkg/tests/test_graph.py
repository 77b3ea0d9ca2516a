import numpy as np
import pytest

from tsnmf.graph import knn_binary_graph, laplacian, projected_features


def brute_force_knn(X, m):
    """O(n^2) oracle: sorted pairwise distances, ties by smaller index."""
    n = X.shape[0]
    W = np.zeros((n, n))
    for i in range(n):
        dists = [(np.linalg.norm(X[i] - X[j]), j) for j in range(n) if j != i]
        for _, j in sorted(dists)[:m]:
            W[i, j] = 1.0
    return np.maximum(W, W.T)


def test_three_points_on_line():
    X = np.array([[0.0], [1.0], [10.0]])
    W = knn_binary_graph(X, 1)
    expected = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0.0]])
    assert np.array_equal(W, expected)


def test_all_neighbors_complete_graph():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((4, 3))
    W = knn_binary_graph(X, 3)
    assert np.array_equal(W, np.ones((4, 4)) - np.eye(4))


def test_matches_brute_force_oracle():
    rng = np.random.default_rng(42)
    X = rng.standard_normal((20, 5))
    assert np.array_equal(knn_binary_graph(X, 5), brute_force_knn(X, 5))


def test_duplicate_points_get_edges():
    X = np.array([[0.0], [0.0], [5.0]])
    W = knn_binary_graph(X, 1)
    assert W[0, 1] == 1 and W[1, 0] == 1


def test_knn_input_validation():
    with pytest.raises(ValueError):
        knn_binary_graph(np.zeros((1, 2)), 1)
    with pytest.raises(ValueError):
        knn_binary_graph(np.zeros((5, 2)), 5)
    with pytest.raises(ValueError):
        knn_binary_graph(np.zeros((5, 2)), 0)


def test_laplacian_two_node_path():
    g = laplacian(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.array_equal(g.D, np.eye(2))
    assert np.array_equal(g.L, [[1, -1], [-1, 1]])


def test_laplacian_empty_graph():
    g = laplacian(np.zeros((3, 3)))
    assert not g.D.any() and not g.L.any()


def test_laplacian_quadratic_form_oracle():
    rng = np.random.default_rng(1)
    W = rng.random((6, 6))
    W = 0.5 * (W + W.T)
    np.fill_diagonal(W, 0.0)
    g = laplacian(W)
    x = rng.standard_normal(6)
    direct = 0.5 * sum(
        W[i, j] * (x[i] - x[j]) ** 2 for i in range(6) for j in range(6)
    )
    assert abs(x @ g.L @ x - direct) < 1e-10


def test_laplacian_invariants():
    rng = np.random.default_rng(9)
    X = rng.standard_normal((12, 4))
    g = laplacian(knn_binary_graph(X, 3))
    assert np.array_equal(g.W, g.W.T)
    assert not np.diag(g.W).any()
    assert np.allclose(np.diag(g.D), g.W.sum(axis=1))
    assert np.allclose(g.L.sum(axis=1), 0.0, atol=1e-12)
    assert np.linalg.eigvalsh(g.L).min() > -1e-9  # PSD


def test_laplacian_rejects_asymmetric():
    with pytest.raises(ValueError):
        laplacian(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_projected_features_identity_basis():
    rng = np.random.default_rng(3)
    X = rng.standard_normal((5, 3, 4))
    feats = projected_features(X, np.eye(4), "right")
    flat = X.transpose(0, 2, 1).reshape(5, 12)
    assert np.allclose(feats, flat, atol=1e-14)


def test_projected_features_orthogonal_complement():
    X = np.array([[[1.0, 0.0]]])
    P = np.array([[0.0], [1.0]])
    feats = projected_features(X, P, "right")
    assert not feats.any()


def test_projection_norm_identity():
    rng = np.random.default_rng(4)
    X = rng.standard_normal((6, 4, 5))
    P = np.linalg.qr(rng.standard_normal((5, 2)))[0]
    for Xi in X:
        assert abs(
            np.linalg.norm(Xi @ P @ P.T) - np.linalg.norm(Xi @ P)
        ) < 1e-10


def test_identity_projection_reproduces_raw_graph():
    rng = np.random.default_rng(8)
    X = rng.standard_normal((10, 3, 3))
    raw = knn_binary_graph(X.transpose(0, 2, 1).reshape(10, 9), 3)
    proj = knn_binary_graph(projected_features(X, np.eye(3), "right"), 3)
    assert np.array_equal(raw, proj)


def test_left_projection_shapes_and_errors():
    rng = np.random.default_rng(5)
    X = rng.standard_normal((4, 3, 5))
    Q = np.linalg.qr(rng.standard_normal((3, 2)))[0]
    assert projected_features(X, Q, "left").shape == (4, 15)
    with pytest.raises(ValueError):
        projected_features(X, Q, "right")  # wrong side for these dims
