"""Scikit-learn style estimator wrappers around the functional solvers."""

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin

from . import baselines, solver
from .data import Dataset2D

__all__ = ["TSNMF", "SemiNMF", "TwoDPCA"]


def _as_samples(X):
    if isinstance(X, Dataset2D):
        return X.samples
    X = np.asarray(X, dtype=float)
    if X.ndim != 3:
        raise ValueError(f"expected a Dataset2D or (n, a, b) array, got shape {X.shape}")
    return X


class TSNMF(ClusterMixin, BaseEstimator):
    """Clustering of 2D matrices by projected semi-NMF with adaptive graphs.

    Parameters
    ----------
    n_clusters : number of centroids/clusters k.
    rank : projection rank r (columns kept in each orthonormal basis).
    lambda1 : weight of the projection expressiveness terms.
    lambda2 : weight of the graph smoothness term.
    t_max : maximum number of outer iterations.
    rel_tol : relative objective-change stopping threshold.
    m_neighbors : neighbor count of the binary kNN graphs.
    epsilon_div : denominator guard in the multiplicative update.
    restarts : k-means restarts when clustering the learned coefficients.
    random_state : seed controlling initialization and final k-means.

    Attributes (after fit)
    ----------------------
    U_, V_, P_, Q_ : learned factors (normalized).
    labels_ : cluster labels from k-means on the rows of V_.
    objective_trace_ : objective value after each outer iteration.
    n_iter_ : number of outer iterations executed.
    """

    def __init__(
        self,
        n_clusters=2,
        rank=3,
        lambda1=1.0,
        lambda2=1.0,
        t_max=100,
        rel_tol=1e-6,
        m_neighbors=5,
        epsilon_div=1e-10,
        restarts=10,
        random_state=0,
    ):
        self.n_clusters = n_clusters
        self.rank = rank
        self.lambda1 = lambda1
        self.lambda2 = lambda2
        self.t_max = t_max
        self.rel_tol = rel_tol
        self.m_neighbors = m_neighbors
        self.epsilon_div = epsilon_div
        self.restarts = restarts
        self.random_state = random_state

    def fit(self, X, y=None, callback=None):
        samples = _as_samples(X)
        model, trace = solver.fit(
            samples,
            k=self.n_clusters,
            r=self.rank,
            lambda1=self.lambda1,
            lambda2=self.lambda2,
            t_max=self.t_max,
            rel_tol=self.rel_tol,
            m_neighbors=self.m_neighbors,
            epsilon_div=self.epsilon_div,
            seed=self.random_state,
            callback=callback,
        )
        self.model_ = model
        self.U_, self.V_, self.P_, self.Q_ = model.U, model.V, model.P, model.Q
        self.objective_trace_ = trace
        self.n_iter_ = len(trace)
        self.labels_ = solver.predict_labels(
            model, self.n_clusters, restarts=self.restarts, seed=self.random_state
        )
        return self

    def predict(self, X=None):
        """Labels of the fitted samples (the model has no out-of-sample map)."""
        if not hasattr(self, "labels_"):
            raise RuntimeError("TSNMF instance is not fitted yet")
        return self.labels_


class SemiNMF(BaseEstimator):
    """Vectorized semi-NMF on flattened samples: Y ~ U V^T, V >= 0."""

    def __init__(self, n_components=2, t_max=200, random_state=0):
        self.n_components = n_components
        self.t_max = t_max
        self.random_state = random_state

    def fit(self, X, y=None):
        if isinstance(X, Dataset2D) or np.asarray(X).ndim == 3:
            flat = Dataset2D(samples=_as_samples(X), labels=None).flattened()
        else:
            flat = np.asarray(X, dtype=float)
        Y = flat.T  # samples as columns
        U, V, trace = baselines.seminmf_fit(
            Y, self.n_components, t_max=self.t_max, seed=self.random_state
        )
        self.components_ = U
        self.coefficients_ = V
        self.objective_trace_ = trace
        return self

    def fit_transform(self, X, y=None):
        return self.fit(X).coefficients_


class TwoDPCA(TransformerMixin, BaseEstimator):
    """Right-side 2DPCA: projects each a-by-b sample onto r column directions."""

    def __init__(self, rank=3):
        self.rank = rank

    def fit(self, X, y=None):
        samples = _as_samples(X)
        self.basis_ = baselines.twodpca_fit(samples, self.rank)
        return self

    def transform(self, X):
        samples = _as_samples(X)
        return samples @ self.basis_
