"""Grid-search experiment protocol, parameter curves, and scaling benchmark.

All runners derive per-job seeds deterministically from the master seed and
the job coordinates, so a rerun with the same configuration reproduces every
random choice. Output is CSV only (comma separator, LF line endings, header
row); plotting is left to external tools.
"""

import csv
import time
from dataclasses import dataclass
from itertools import product

import numpy as np

from . import baselines, solver
from .data import sample_subset, synth_clusters
from .metrics import clustering_accuracy, nmi, purity

__all__ = [
    "ExperimentConfig",
    "DEFAULT_LAMBDA_GRID",
    "run_experiment",
    "emit_r_curve",
    "emit_lambda_surface",
    "bench_scaling",
]

DEFAULT_LAMBDA_GRID = (1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3)
DEFAULT_R_GRID = (1, 3, 5, 7, 9)
EXTENDED_R_GRID = tuple(range(1, 20, 2))

METHODS = ("tsnmf", "seminmf", "kmeans", "twodpca+kmeans")

RAW_HEADER = [
    "method", "N", "subset_seed", "lambda1", "lambda2", "r",
    "acc", "nmi", "purity", "iterations", "wall_ms",
]
SUMMARY_HEADER = [
    "method", "N", "subsets",
    "acc_mean", "acc_std", "nmi_mean", "nmi_std", "purity_mean", "purity_std",
]


@dataclass
class ExperimentConfig:
    """Knobs of the subset/grid clustering protocol."""

    dataset: str = ""
    format: str = "bundle"
    method: str = "tsnmf"
    n_values: tuple = (2,)
    subsets_per_n: int = 10
    lambda_grid: tuple = DEFAULT_LAMBDA_GRID
    r_grid: tuple = DEFAULT_R_GRID
    m_neighbors: int = 5
    t_max: int = 100
    restarts: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if not self.n_values or not self.lambda_grid or not self.r_grid:
            raise ValueError("n_values, lambda_grid, and r_grid must be nonempty")
        if self.subsets_per_n < 1:
            raise ValueError("subsets_per_n must be at least 1")


def _derive_seed(*parts):
    """Stable 32-bit seed from integer job coordinates."""
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1)[0])


def _grid_for(config):
    """(lambda1, lambda2, r) grid points for the configured method, sorted."""
    if config.method == "tsnmf":
        return sorted(product(config.lambda_grid, config.lambda_grid, config.r_grid))
    if config.method == "twodpca+kmeans":
        return [(0.0, 0.0, r) for r in sorted(config.r_grid)]
    return [(0.0, 0.0, 0)]


def _run_point(subset, method, k, lam1, lam2, r, m_neighbors, t_max, restarts, seed):
    """Fit one method at one grid point; returns (labels, iterations)."""
    flat = subset.flattened()
    if method == "tsnmf":
        model, trace = solver.fit(
            subset.samples, k=k, r=r, lambda1=lam1, lambda2=lam2,
            t_max=t_max, m_neighbors=m_neighbors, seed=seed,
        )
        labels = solver.predict_labels(model, k, restarts=restarts, seed=seed)
        return labels, len(trace)
    if method == "seminmf":
        _, V, trace = baselines.seminmf_fit(flat.T, k, t_max=t_max, seed=seed)
        labels, _ = baselines.kmeans(V, k, restarts=restarts, seed=seed)
        return labels, len(trace)
    if method == "kmeans":
        labels, _ = baselines.kmeans(flat, k, restarts=restarts, seed=seed)
        return labels, 0
    if method == "twodpca+kmeans":
        basis = baselines.twodpca_fit(subset.samples, r)
        feats = (subset.samples @ basis).reshape(subset.n, -1)
        labels, _ = baselines.kmeans(feats, k, restarts=restarts, seed=seed)
        return labels, 0
    raise ValueError(f"unknown method {method!r}")


def _score(labels, truth):
    return (
        clustering_accuracy(labels, truth),
        nmi(labels, truth),
        purity(labels, truth),
    )


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _fmt_metric(x):
    return f"{x:.6f}"


def run_experiment(config, dataset, raw_path, summary_path):
    """Full protocol: every N, every seeded subset, every grid point.

    Raw rows go to raw_path; summary_path aggregates, per (method, N), the
    best-over-grid accuracy (ties to the lexicographically smallest grid
    point) as mean and sample std across subsets.
    """
    if dataset.labels is None:
        raise ValueError("the experiment protocol needs a labeled dataset")
    grid = _grid_for(config)
    raw_rows = []
    summary_rows = []
    for N in config.n_values:
        best_per_subset = []
        for s in range(config.subsets_per_n):
            subset_seed = _derive_seed(config.seed, 1, N, s)
            subset = sample_subset(dataset, N, subset_seed)
            best = None
            for g, (lam1, lam2, r) in enumerate(grid):
                job_seed = _derive_seed(config.seed, 2, N, s, g)
                start = time.perf_counter()
                labels, iters = _run_point(
                    subset, config.method, N, lam1, lam2, r,
                    config.m_neighbors, config.t_max, config.restarts, job_seed,
                )
                wall_ms = (time.perf_counter() - start) * 1e3
                acc, nmi_v, pur = _score(labels, subset.labels)
                raw_rows.append([
                    config.method, N, subset_seed, f"{lam1:g}", f"{lam2:g}", r,
                    _fmt_metric(acc), _fmt_metric(nmi_v), _fmt_metric(pur),
                    iters, f"{wall_ms:.3f}",
                ])
                # grid is sorted, so strict > keeps the smallest tied point
                if best is None or acc > best[0]:
                    best = (acc, nmi_v, pur)
            best_per_subset.append(best)
        arr = np.array(best_per_subset)
        std = arr.std(axis=0, ddof=1) if arr.shape[0] > 1 else np.zeros(3)
        mean = arr.mean(axis=0)
        summary_rows.append([
            config.method, N, config.subsets_per_n,
            _fmt_metric(mean[0]), _fmt_metric(std[0]),
            _fmt_metric(mean[1]), _fmt_metric(std[1]),
            _fmt_metric(mean[2]), _fmt_metric(std[2]),
        ])
    _write_csv(raw_path, RAW_HEADER, raw_rows)
    _write_csv(summary_path, SUMMARY_HEADER, summary_rows)
    return raw_rows, summary_rows


def _mean_scores_over_subsets(config, dataset, N, lam1, lam2, r, tag):
    scores = []
    for s in range(config.subsets_per_n):
        subset_seed = _derive_seed(config.seed, 1, N, s)
        subset = sample_subset(dataset, N, subset_seed)
        job_seed = _derive_seed(config.seed, tag, N, s, int(r))
        labels, _ = _run_point(
            subset, config.method, N, lam1, lam2, r,
            config.m_neighbors, config.t_max, config.restarts, job_seed,
        )
        scores.append(_score(labels, subset.labels))
    return np.mean(scores, axis=0)


def emit_r_curve(config, dataset, out_path):
    """Accuracy/NMI/purity versus projection rank, lambdas tuned per rank.

    Uses the first configured N value; for each rank the (lambda1, lambda2)
    pair with the best mean accuracy across subsets is reported.
    """
    if dataset.labels is None:
        raise ValueError("r-curve needs a labeled dataset")
    N = config.n_values[0]
    lam_pairs = (
        sorted(product(config.lambda_grid, config.lambda_grid))
        if config.method == "tsnmf"
        else [(0.0, 0.0)]
    )
    rows = []
    for r in sorted(config.r_grid):
        best = None
        for lam1, lam2 in lam_pairs:
            mean = _mean_scores_over_subsets(config, dataset, N, lam1, lam2, r, tag=3)
            if best is None or mean[0] > best[0]:
                best = tuple(mean)
        rows.append([r, _fmt_metric(best[0]), _fmt_metric(best[1]), _fmt_metric(best[2])])
    _write_csv(out_path, ["r", "acc", "nmi", "purity"], rows)
    return rows


def emit_lambda_surface(config, dataset, out_path):
    """Accuracy/NMI/purity over the lambda1-by-lambda2 grid, rank tuned per cell."""
    if dataset.labels is None:
        raise ValueError("lambda-surface needs a labeled dataset")
    N = config.n_values[0]
    rows = []
    for lam1, lam2 in sorted(product(config.lambda_grid, config.lambda_grid)):
        best = None
        for r in sorted(config.r_grid):
            mean = _mean_scores_over_subsets(config, dataset, N, lam1, lam2, r, tag=4)
            if best is None or mean[0] > best[0]:
                best = tuple(mean)
        rows.append([
            f"{lam1:g}", f"{lam2:g}",
            _fmt_metric(best[0]), _fmt_metric(best[1]), _fmt_metric(best[2]),
        ])
    _write_csv(out_path, ["lambda1", "lambda2", "acc", "nmi", "purity"], rows)
    return rows


def _one_iteration(X, model, lambda1, lambda2, r, m_neighbors, G_P, G_Q):
    res = solver.residuals(X, model.U, model.V)
    P = solver.update_p(res, G_P, lambda1, r)
    Q = solver.update_q(res, G_Q, lambda1, r)
    graphs = solver.build_graphs(X, P, Q, m_neighbors)
    scratch = solver.make_scratch(X, model.U, model.V, P, Q, m_neighbors, graphs=graphs)
    V = solver.update_v(model.V, scratch, lambda2)
    solver.update_u(X, V)


def bench_scaling(sizes, d=256, out_path=None, k=3, r=3, m_neighbors=5, seed=0,
                  min_time_s=0.2, max_repeats=10):
    """Wall time of one outer solver iteration across sample counts.

    Each size n gets a synthetic dataset of n matrices with a*b = d; the
    loop body is repeated until min_time_s of total work is accumulated and
    the per-iteration time is the average. Emits rows (n, d, wall_ms).
    """
    a = int(round(np.sqrt(d)))
    rows = []
    for n in sizes:
        n_per = -(-n // k)  # ceil
        ds = synth_clusters(k, n_per, a, a, noise_sigma=0.05, seed=seed)
        X = ds.samples[:n]
        model = solver.initialize(X, k, r, seed)
        G_P, G_Q = solver.moments(X)
        _one_iteration(X, model, 1.0, 1.0, r, m_neighbors, G_P, G_Q)  # warm-up
        total = 0.0
        reps = 0
        while reps == 0 or (total < min_time_s and reps < max_repeats):
            start = time.perf_counter()
            _one_iteration(X, model, 1.0, 1.0, r, m_neighbors, G_P, G_Q)
            total += time.perf_counter() - start
            reps += 1
        rows.append([n, a * a, f"{total / reps * 1e3:.3f}"])
    if out_path is not None:
        _write_csv(out_path, ["n", "d", "wall_ms"], rows)
    return rows
