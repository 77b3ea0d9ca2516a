"""Alternating solver for two-dimensional semi-NMF with adaptive graphs.

The model factors a collection of a-by-b matrices X_i into k unconstrained
2D centroids U_j, nonnegative sample coefficients V (n-by-k), and two
orthonormal projection bases P (b-by-r, right) and Q (a-by-r, left). Each
outer iteration updates P and Q by a smallest-eigenvector problem, rebuilds
the two k-NN graphs from the projected features, applies one multiplicative
update to V, and recomputes U in closed form.

All flattening of 2D samples is column-major throughout.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .graph import Graph, knn_binary_graph, laplacian, projected_features
from .linalg import posneg_split, spd_pinverse, sym_eig_largest, sym_eig_smallest

__all__ = [
    "FactorModel",
    "GraphPair",
    "IterationScratch",
    "moments",
    "residuals",
    "update_p",
    "update_q",
    "projection_objective",
    "build_graphs",
    "gram_terms",
    "make_scratch",
    "objective_total",
    "objective_f",
    "update_v",
    "update_u",
    "normalize_factors",
    "kkt_residual",
    "initialize",
    "fit",
    "predict_labels",
    "save_model",
    "load_model",
]


@dataclass
class FactorModel:
    """Learned factors: centroids U, coefficients V, projection bases P, Q."""

    U: np.ndarray  # (k, a, b)
    V: np.ndarray  # (n, k), nonnegative
    P: np.ndarray  # (b, r), orthonormal columns
    Q: np.ndarray  # (a, r), orthonormal columns


@dataclass
class GraphPair:
    """Graphs built from right- (X_i P P^T) and left- (Q Q^T X_i) projected features."""

    right: Graph
    left: Graph


@dataclass
class IterationScratch:
    """Per-iteration derived quantities consumed by the V update and its tests."""

    residuals: np.ndarray  # (n, a, b)
    G_P: np.ndarray  # (b, b)
    G_Q: np.ndarray  # (a, a)
    A1: np.ndarray  # (k, k)
    A2: np.ndarray  # (k, k)
    B1: np.ndarray  # (n, k)
    B2: np.ndarray  # (n, k)
    graphs: GraphPair


def _vec(mats):
    """Stack 2D matrices as column-major-flattened columns: (a*b, count)."""
    M = np.asarray(mats, dtype=float)
    return M.transpose(0, 2, 1).reshape(M.shape[0], -1).T


def moments(samples):
    """Data moments G_P = sum X_i^T X_i (b, b) and G_Q = sum X_i X_i^T (a, a)."""
    X = np.asarray(samples, dtype=float)
    if X.ndim != 3 or X.shape[0] < 1:
        raise ValueError(f"samples must be nonempty (n, a, b), got {X.shape}")
    G_P = np.einsum("nab,nac->bc", X, X)
    G_Q = np.einsum("nab,ncb->ac", X, X)
    return 0.5 * (G_P + G_P.T), 0.5 * (G_Q + G_Q.T)


def residuals(samples, U, V):
    """Reconstruction residuals X_i - sum_j U_j v_ij, one per sample."""
    X = np.asarray(samples, dtype=float)
    U = np.asarray(U, dtype=float)
    V = np.asarray(V, dtype=float)
    if V.shape != (X.shape[0], U.shape[0]) or U.shape[1:] != X.shape[1:]:
        raise ValueError(
            f"shape mismatch: samples {X.shape}, U {U.shape}, V {V.shape}"
        )
    return X - np.einsum("kab,nk->nab", U, V)


def _residual_scatter(res, side):
    if side == "right":
        S = np.einsum("nab,nac->bc", res, res)
    else:
        S = np.einsum("nab,ncb->ac", res, res)
    return 0.5 * (S + S.T)


def update_p(res, G_P, lambda1, r):
    """Right projection: smallest-r eigenvectors of sum L_i^T L_i - lambda1 G_P."""
    return sym_eig_smallest(_residual_scatter(res, "right") - lambda1 * G_P, r)


def update_q(res, G_Q, lambda1, r):
    """Left projection: smallest-r eigenvectors of sum L_i L_i^T - lambda1 G_Q."""
    return sym_eig_smallest(_residual_scatter(res, "left") - lambda1 * G_Q, r)


def projection_objective(res, G, basis, lambda1, side):
    """Value of the P (or Q) subproblem at an orthonormal basis.

    Equals the reconstruction term restricted to the projected subspace minus
    the lambda1-weighted expressiveness trace; minimized by update_p/update_q.
    """
    S = _residual_scatter(res, side) - lambda1 * G
    return float(np.trace(basis.T @ S @ basis))


def build_graphs(samples, P, Q, m_neighbors):
    """GraphPair on right- and left-projected features with binary kNN weights."""
    right = laplacian(knn_binary_graph(projected_features(samples, P, "right"), m_neighbors))
    left = laplacian(knn_binary_graph(projected_features(samples, Q, "left"), m_neighbors))
    return GraphPair(right=right, left=left)


def gram_terms(samples, U, P, Q):
    """Gram and cross terms of the projected centroids and data.

    A1 = Up^T Up and B1 = Xp^T Up where Up, Xp hold the column-major
    vectorized right-projected centroids/samples; A2, B2 likewise for the
    left projection.
    """
    X = np.asarray(samples, dtype=float)
    U = np.asarray(U, dtype=float)
    Pp = P @ P.T
    Qq = Q @ Q.T
    Up = _vec(U @ Pp)
    Xp = _vec(X @ Pp)
    Uq = _vec(np.einsum("ca,kab->kcb", Qq, U))
    Xq = _vec(np.einsum("ca,nab->ncb", Qq, X))
    A1 = Up.T @ Up
    A2 = Uq.T @ Uq
    return 0.5 * (A1 + A1.T), 0.5 * (A2 + A2.T), Xp.T @ Up, Xq.T @ Uq


def make_scratch(samples, U, V, P, Q, m_neighbors, graphs=None):
    """Assemble the per-iteration scratch for the current factors."""
    G_P, G_Q = moments(samples)
    if graphs is None:
        graphs = build_graphs(samples, P, Q, m_neighbors)
    A1, A2, B1, B2 = gram_terms(samples, U, P, Q)
    return IterationScratch(
        residuals=residuals(samples, U, V),
        G_P=G_P,
        G_Q=G_Q,
        A1=A1,
        A2=A2,
        B1=B1,
        B2=B2,
        graphs=graphs,
    )


def objective_total(samples, model, graphs, lambda1, lambda2):
    """Full model objective; may be negative through the -lambda1 traces."""
    X = np.asarray(samples, dtype=float)
    U, V, P, Q = model.U, model.V, model.P, model.Q
    C = np.einsum("kab,nk->nab", U, V)
    Pp = P @ P.T
    Qq = Q @ Q.T
    right = float(np.sum(((X - C) @ Pp) ** 2))
    left = float(np.sum((np.einsum("ca,nab->ncb", Qq, X - C)) ** 2))
    G_P, G_Q = moments(X)
    expr = float(np.trace(P.T @ G_P @ P) + np.trace(Q.T @ G_Q @ Q))
    L_sum = graphs.right.L + graphs.left.L
    smooth = float(np.trace(V.T @ L_sum @ V))
    return right + left - lambda1 * expr + lambda2 * smooth


def objective_f(V, scratch, lambda2):
    """Trace expansion of the V subproblem objective for a fixed scratch.

    Differs from the total objective restricted to V by a V-independent
    constant; used by the monotonicity and KKT tests.
    """
    V = np.asarray(V, dtype=float)
    A1p, A1m = posneg_split(scratch.A1)
    A2p, A2m = posneg_split(scratch.A2)
    B1p, B1m = posneg_split(scratch.B1)
    B2p, B2m = posneg_split(scratch.B2)
    gp, gq = scratch.graphs.right, scratch.graphs.left
    total = (
        -2.0 * np.sum(V * B1p)
        + 2.0 * np.sum(V * B1m)
        + np.sum((V @ A1p) * V)
        - np.sum((V @ A1m) * V)
        - 2.0 * np.sum(V * B2p)
        + 2.0 * np.sum(V * B2m)
        + np.sum((V @ A2p) * V)
        - np.sum((V @ A2m) * V)
        + lambda2 * np.sum((gp.D @ V) * V)
        - lambda2 * np.sum((gp.W @ V) * V)
        + lambda2 * np.sum((gq.D @ V) * V)
        - lambda2 * np.sum((gq.W @ V) * V)
    )
    return float(total)


def update_v(V, scratch, lambda2, epsilon_div=1e-10):
    """One multiplicative update of the nonnegative coefficients.

    v'_ij = v_ij * sqrt(numerator / denominator) with the positive parts of
    the gram/cross terms and the graph weights in the numerator and the
    negative parts and degrees in the denominator; zeros stay zero.
    """
    V = np.asarray(V, dtype=float)
    if np.any(V < 0):
        raise ValueError("V must be elementwise nonnegative")
    A1p, A1m = posneg_split(scratch.A1)
    A2p, A2m = posneg_split(scratch.A2)
    B1p, B1m = posneg_split(scratch.B1)
    B2p, B2m = posneg_split(scratch.B2)
    gp, gq = scratch.graphs.right, scratch.graphs.left
    num = B1p + B2p + V @ (A1m + A2m) + lambda2 * ((gp.W + gq.W) @ V)
    den = B1m + B2m + V @ (A1p + A2p) + lambda2 * ((gp.D + gq.D) @ V)
    return V * np.sqrt(num / (den + epsilon_div))


def update_u(samples, V):
    """Closed-form centroid update U_i = sum_j X_j (V (V^T V)^+)_ji."""
    X = np.asarray(samples, dtype=float)
    V = np.asarray(V, dtype=float)
    C = V @ spd_pinverse(V.T @ V)
    return np.einsum("nab,nk->kab", X, C)


def normalize_factors(U, V):
    """Rescale each coefficient column by its squared norm, centroids inversely.

    The product vec(U) V^T is unchanged. Zero columns of V have no defined
    scale and are left untouched with a degenerate-factor warning.
    """
    U = np.asarray(U, dtype=float).copy()
    V = np.asarray(V, dtype=float).copy()
    for j in range(V.shape[1]):
        s = float(V[:, j] @ V[:, j])
        if s == 0.0:
            warnings.warn(f"coefficient column {j} is zero; factor is degenerate")
            continue
        V[:, j] /= s
        U[j] *= s
    return U, V


def kkt_residual(V, scratch, lambda2):
    """Frobenius norm of the stationarity gradient masked by V.

    Zero exactly at KKT points of the V subproblem (complementary
    slackness): each entry of the gradient of the subproblem objective is
    multiplied elementwise by the corresponding entry of V.
    """
    V = np.asarray(V, dtype=float)
    L_sum = scratch.graphs.right.L + scratch.graphs.left.L
    grad = (
        -2.0 * scratch.B1
        - 2.0 * scratch.B2
        + 2.0 * V @ (scratch.A1 + scratch.A2)
        + 2.0 * lambda2 * (L_sum @ V)
    )
    return float(np.linalg.norm(grad * V))


def initialize(samples, k, r, seed, restarts=5):
    """Deterministic starting point for the alternating solver.

    P0 and Q0 take the top-r eigenvectors of the data moments (the
    lambda1-only solution of the projection subproblems with zero
    residuals); V0 is k-means cluster indicators on the flattened samples
    plus 0.2; U0 is the closed-form centroid update at V0.
    """
    from .baselines import kmeans

    X = np.asarray(samples, dtype=float)
    n, a, b = X.shape
    if k > n:
        raise ValueError(f"k={k} exceeds sample count n={n}")
    G_P, G_Q = moments(X)
    P0 = sym_eig_largest(G_P, r)
    Q0 = sym_eig_largest(G_Q, r)
    flat = X.transpose(0, 2, 1).reshape(n, a * b)
    labels, _ = kmeans(flat, k, restarts=restarts, seed=seed)
    V0 = np.full((n, k), 0.2)
    V0[np.arange(n), labels] += 1.0
    U0 = update_u(X, V0)
    return FactorModel(U=U0, V=V0, P=P0, Q=Q0)


def fit(
    samples,
    k,
    r,
    lambda1=1.0,
    lambda2=1.0,
    t_max=100,
    rel_tol=1e-6,
    m_neighbors=5,
    epsilon_div=1e-10,
    seed=0,
    callback=None,
):
    """Run the full alternating optimization.

    Per outer iteration: update P and Q from the current residuals (graphs
    held fixed), rebuild both graphs from the new projections, apply one
    multiplicative V update, recompute U in closed form. Stops at t_max
    iterations or when the relative objective change drops below rel_tol.
    The returned model has its factors normalized.

    Returns (model, trace) where trace holds the objective value after each
    iteration.
    """
    X = np.asarray(samples, dtype=float)
    n, a, b = X.shape
    if not 1 <= r <= min(a, b):
        raise ValueError(f"r must be in [1, {min(a, b)}], got {r}")
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    if t_max < 1:
        raise ValueError("t_max must be at least 1")

    model = initialize(X, k, r, seed)
    G_P, G_Q = moments(X)
    trace = []
    for t in range(t_max):
        res = residuals(X, model.U, model.V)
        model.P = update_p(res, G_P, lambda1, r)
        model.Q = update_q(res, G_Q, lambda1, r)
        graphs = build_graphs(X, model.P, model.Q, m_neighbors)
        scratch = make_scratch(X, model.U, model.V, model.P, model.Q,
                               m_neighbors, graphs=graphs)
        model.V = update_v(model.V, scratch, lambda2, epsilon_div)
        model.U = update_u(X, model.V)
        value = objective_total(X, model, graphs, lambda1, lambda2)
        trace.append(value)
        if callback is not None:
            callback(t, model, graphs, value)
        if t > 0 and abs(trace[-1] - trace[-2]) / (1.0 + abs(trace[-1])) < rel_tol:
            break
    model.U, model.V = normalize_factors(model.U, model.V)
    return model, trace


def predict_labels(model, k, restarts=10, seed=0):
    """Cluster the coefficient rows with k-means; best of `restarts` by inertia."""
    from .baselines import kmeans

    labels, _ = kmeans(model.V, k, restarts=restarts, seed=seed)
    return labels


_MODEL_MAGIC = "TSNMF-MODEL 1"


def save_model(model, path, config=None):
    """Serialize a FactorModel to a text artifact.

    Layout: format-version line, `dims n a b k r`, optional `config key value`
    lines, then row-major numeric blocks for each centroid, V, P, and Q at 17
    significant digits (round-trip exact for doubles).
    """
    k, a, b = model.U.shape
    n = model.V.shape[0]
    r = model.P.shape[1]
    lines = [_MODEL_MAGIC, f"dims {n} {a} {b} {k} {r}"]
    for key, value in (config or {}).items():
        lines.append(f"config {key} {value}")

    def emit(M):
        for row in np.atleast_2d(M):
            lines.append(" ".join(f"{x:.17g}" for x in row))

    for j in range(k):
        lines.append(f"U {j}")
        emit(model.U[j])
    lines.append("V")
    emit(model.V)
    lines.append("P")
    emit(model.P)
    lines.append("Q")
    emit(model.Q)
    from pathlib import Path

    Path(path).write_text("\n".join(lines) + "\n")


def load_model(path):
    """Inverse of save_model; returns (FactorModel, config dict)."""
    from pathlib import Path

    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != _MODEL_MAGIC:
        raise ValueError(f"{path}: not a model file (missing {_MODEL_MAGIC!r} header)")
    tag, n_s, a_s, b_s, k_s, r_s = lines[1].split()
    if tag != "dims":
        raise ValueError(f"{path}: missing dims line")
    n, a, b, k, r = (int(v) for v in (n_s, a_s, b_s, k_s, r_s))
    pos = 2
    config = {}
    while lines[pos].startswith("config "):
        _, key, value = lines[pos].split(maxsplit=2)
        config[key] = value
        pos += 1

    def read_block(rows, cols, header=None):
        nonlocal pos
        if header is not None:
            if lines[pos] != header:
                raise ValueError(f"{path}: expected {header!r} at line {pos + 1}")
            pos += 1
        block = np.empty((rows, cols))
        for i in range(rows):
            vals = lines[pos].split()
            if len(vals) != cols:
                raise ValueError(f"{path}: bad row width at line {pos + 1}")
            block[i] = [float(v) for v in vals]
            pos += 1
        return block

    U = np.stack([read_block(a, b, header=f"U {j}") for j in range(k)])
    V = read_block(n, k, header="V")
    P = read_block(b, r, header="P")
    Q = read_block(a, r, header="Q")
    return FactorModel(U=U, V=V, P=P, Q=Q), config
