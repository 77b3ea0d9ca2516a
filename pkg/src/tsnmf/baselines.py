"""Reference methods: k-means, vectorized semi-NMF, and 2DPCA projections."""

import warnings

import numpy as np
from sklearn.cluster import KMeans

from .linalg import posneg_split, spd_pinverse, sym_eig_largest

__all__ = ["kmeans", "seminmf_fit", "seminmf_objective", "twodpca_fit"]


def kmeans(points, k, restarts=10, max_iters=300, seed=0):
    """Lloyd's algorithm with k-means++ seeding, best of `restarts` by inertia.

    Deterministic for a fixed seed. Returns (labels, inertia).
    """
    X = np.asarray(points, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"points must be 2D, got shape {X.shape}")
    if not 1 <= k <= X.shape[0]:
        raise ValueError(f"k must be in [1, {X.shape[0]}], got {k}")
    est = KMeans(
        n_clusters=k,
        init="k-means++",
        n_init=restarts,
        max_iter=max_iters,
        random_state=seed,
    ).fit(X)
    return est.labels_.astype(int), float(est.inertia_)


def seminmf_objective(Y, U, V):
    return float(np.linalg.norm(Y - U @ V.T) ** 2)


def seminmf_fit(Y, k, t_max=200, seed=0, tol=1e-8, epsilon_div=1e-10):
    """Vectorized semi-NMF: Y (d, n) ~ U V^T with V nonnegative.

    Alternates the closed-form basis update U = Y V (V^T V)^+ with the
    multiplicative coefficient rule
    v <- v * sqrt(((Y^T U)+ + V (U^T U)-) / ((Y^T U)- + V (U^T U)+)),
    which keeps the squared reconstruction error non-increasing.

    Returns (U, V, trace) with trace holding the objective per iteration.
    """
    Y = np.asarray(Y, dtype=float)
    d, n = Y.shape
    if not 1 <= k <= min(d, n):
        raise ValueError(f"k must be in [1, {min(d, n)}], got {k}")
    labels, _ = kmeans(Y.T, k, restarts=5, seed=seed)
    V = np.full((n, k), 0.2)
    V[np.arange(n), labels] += 1.0
    U = Y @ V @ spd_pinverse(V.T @ V)
    trace = []
    for _ in range(t_max):
        U = Y @ V @ spd_pinverse(V.T @ V)
        YtU = Y.T @ U
        UtU = U.T @ U
        YtUp, YtUm = posneg_split(YtU)
        UtUp, UtUm = posneg_split(UtU)
        V = V * np.sqrt((YtUp + V @ UtUm) / (YtUm + V @ UtUp + epsilon_div))
        trace.append(seminmf_objective(Y, U, V))
        if len(trace) > 1 and abs(trace[-2] - trace[-1]) <= tol * (1.0 + trace[-1]):
            break
    return U, V, trace


def twodpca_fit(samples, r):
    """2DPCA projection basis: top-r eigenvectors of the centered column scatter.

    The scatter is (1/n) sum_i (X_i - Xbar)^T (X_i - Xbar) with Xbar the
    sample mean matrix. Returns a (b, r) orthonormal basis.
    """
    X = np.asarray(samples, dtype=float)
    if X.ndim != 3 or X.shape[0] < 2:
        raise ValueError(f"samples must be (n>=2, a, b), got shape {X.shape}")
    n, a, b = X.shape
    if not 1 <= r <= b:
        raise ValueError(f"r must be in [1, {b}], got {r}")
    centered = X - X.mean(axis=0)
    G_t = np.einsum("nab,nac->bc", centered, centered) / n
    if np.abs(G_t).max(initial=0.0) < 1e-14:
        warnings.warn("degenerate 2DPCA scatter (all samples identical)")
    return sym_eig_largest(0.5 * (G_t + G_t.T), r)
