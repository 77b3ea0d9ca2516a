"""Clustering of 2D matrix collections by two-dimensional semi-NMF."""

from .data import Dataset2D, corrupt, load_dataset, sample_subset, save_bundle, synth_clusters
from .estimators import TSNMF, SemiNMF, TwoDPCA
from .metrics import clustering_accuracy, nmi, purity
from .solver import FactorModel, fit, load_model, predict_labels, save_model

__all__ = [
    "Dataset2D",
    "FactorModel",
    "TSNMF",
    "SemiNMF",
    "TwoDPCA",
    "fit",
    "predict_labels",
    "save_model",
    "load_model",
    "load_dataset",
    "save_bundle",
    "sample_subset",
    "corrupt",
    "synth_clusters",
    "clustering_accuracy",
    "nmi",
    "purity",
]
