"""External clustering quality metrics: accuracy, NMI, and purity."""

import numpy as np
from scipy.optimize import linear_sum_assignment

__all__ = ["clustering_accuracy", "nmi", "purity", "contingency"]


def _check_pair(pred, truth):
    pred = np.asarray(pred, dtype=int)
    truth = np.asarray(truth, dtype=int)
    if pred.ndim != 1 or truth.ndim != 1:
        raise ValueError("partitions must be 1D integer arrays")
    if pred.size != truth.size:
        raise ValueError(f"length mismatch: {pred.size} vs {truth.size}")
    if pred.size == 0:
        raise ValueError("empty partitions")
    return pred, truth


def contingency(pred, truth):
    """Counts table C[i, j] = #{samples with pred==i and truth==j}."""
    pred, truth = _check_pair(pred, truth)
    p_ids, p_inv = np.unique(pred, return_inverse=True)
    t_ids, t_inv = np.unique(truth, return_inverse=True)
    C = np.zeros((p_ids.size, t_ids.size), dtype=int)
    np.add.at(C, (p_inv, t_inv), 1)
    return C


def clustering_accuracy(pred, truth):
    """Fraction correct under the best one-to-one cluster-to-class mapping.

    The contingency matrix is padded square and the optimal assignment is
    solved exactly, so the result is the true maximum over injective
    mappings.
    """
    C = contingency(pred, truth)
    size = max(C.shape)
    padded = np.zeros((size, size), dtype=int)
    padded[: C.shape[0], : C.shape[1]] = C
    rows, cols = linear_sum_assignment(-padded)
    return float(padded[rows, cols].sum()) / C.sum()


def _entropy(counts):
    p = counts[counts > 0] / counts.sum()
    return float(-(p * np.log(p)).sum())


def nmi(pred, truth):
    """Mutual information normalized by sqrt of the two partition entropies.

    Degenerate cases: two single-cluster partitions score 1; if only one
    side is single-cluster the score is 0.
    """
    C = contingency(pred, truth).astype(float)
    n = C.sum()
    h_pred = _entropy(C.sum(axis=1))
    h_truth = _entropy(C.sum(axis=0))
    if h_pred == 0.0 or h_truth == 0.0:
        return 1.0 if h_pred == h_truth else 0.0
    outer = np.outer(C.sum(axis=1), C.sum(axis=0))
    nz = C > 0
    mi = float((C[nz] / n * np.log(n * C[nz] / outer[nz])).sum())
    return mi / np.sqrt(h_pred * h_truth)


def purity(pred, truth):
    """Average over samples of the majority-class fraction of their cluster."""
    C = contingency(pred, truth)
    return float(C.max(axis=1).sum()) / C.sum()
