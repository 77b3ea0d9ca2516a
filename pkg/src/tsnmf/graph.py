"""k-nearest-neighbor similarity graphs and their Laplacians.

Graphs are rebuilt every outer solver iteration from the currently projected
features, so construction is kept simple and fully deterministic: binary
weights, union (OR) symmetrization, distance ties broken by smaller sample
index.
"""

from dataclasses import dataclass

import numpy as np

__all__ = ["Graph", "knn_binary_graph", "laplacian", "projected_features"]


@dataclass(frozen=True)
class Graph:
    """Weight / degree / Laplacian triple of an undirected weighted graph."""

    W: np.ndarray
    D: np.ndarray
    L: np.ndarray

    @property
    def n(self):
        return self.W.shape[0]


def knn_binary_graph(features, m_neighbors):
    """Binary m-nearest-neighbor affinity matrix with union symmetrization.

    W[i, j] = 1 iff j is among the m nearest Euclidean neighbors of i or
    i is among the m nearest of j. The diagonal is zero; a sample is never
    its own neighbor. Ties are broken by smaller sample index.
    """
    X = np.asarray(features, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"features must be 2D (n, d), got shape {X.shape}")
    n = X.shape[0]
    if n < 2:
        raise ValueError("need at least 2 samples to build a graph")
    if not 1 <= m_neighbors <= n - 1:
        raise ValueError(f"m_neighbors must be in [1, {n - 1}], got {m_neighbors}")

    sq = np.sum(X * X, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.fill_diagonal(d2, np.inf)  # self excluded from its own neighbor list

    W = np.zeros((n, n))
    # stable sort keeps smaller indices first among equal distances
    order = np.argsort(d2, axis=1, kind="stable")[:, :m_neighbors]
    rows = np.repeat(np.arange(n), m_neighbors)
    W[rows, order.ravel()] = 1.0
    W = np.maximum(W, W.T)
    return W


def laplacian(W):
    """Degree matrix and unnormalized Laplacian L = D - W for a weight matrix."""
    W = np.asarray(W, dtype=float)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise ValueError(f"W must be square, got shape {W.shape}")
    if np.abs(W - W.T).max(initial=0.0) > 1e-10:
        raise ValueError("W must be symmetric")
    D = np.diag(W.sum(axis=1))
    return Graph(W=W, D=D, L=D - W)


def projected_features(samples, basis, side):
    """Flatten projected samples into feature vectors, one row per sample.

    side="right" computes X_i B B^T (basis rows must equal b); side="left"
    computes B B^T X_i (basis rows must equal a). Flattening is column-major,
    consistent with the rest of the package.
    """
    X = np.asarray(samples, dtype=float)
    if X.ndim != 3:
        raise ValueError(f"samples must be (n, a, b), got shape {X.shape}")
    n, a, b = X.shape
    B = np.asarray(basis, dtype=float)
    proj = B @ B.T
    if side == "right":
        if B.shape[0] != b:
            raise ValueError(f"right basis needs {b} rows, got {B.shape[0]}")
        Y = X @ proj
    elif side == "left":
        if B.shape[0] != a:
            raise ValueError(f"left basis needs {a} rows, got {B.shape[0]}")
        Y = np.einsum("pa,nab->npb", proj, X)
    else:
        raise ValueError(f"side must be 'right' or 'left', got {side!r}")
    # column-major flattening of each sample
    return Y.transpose(0, 2, 1).reshape(n, a * b)
