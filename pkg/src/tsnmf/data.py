"""Dataset container, file formats, subset sampling, corruption, synthesis.

Bundle file format (text):
    line 1:  ``TSNMF-BUNDLE 1``
    line 2:  ``n a b labels={0|1}``
    then n blocks, each ``a`` lines of ``b`` space-separated decimals
    (17 significant digits), and, when labels are present, a final line of
    n space-separated integers.

CSV directory format: one numeric CSV per sample, read in lexicographic
filename order, plus an optional ``labels.csv`` with one integer label per
line.
"""

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "Dataset2D",
    "DatasetFormatError",
    "load_dataset",
    "save_bundle",
    "sample_subset",
    "corrupt",
    "synth_clusters",
]


class DatasetFormatError(Exception):
    """Raised for unreadable, malformed, or dimensionally inconsistent data."""


@dataclass(frozen=True)
class Dataset2D:
    """n samples, each an a-by-b real matrix, with optional integer labels."""

    samples: np.ndarray  # (n, a, b)
    labels: np.ndarray | None = None  # (n,) ints

    def __post_init__(self):
        X = np.asarray(self.samples, dtype=float)
        if X.ndim != 3 or X.shape[0] < 1:
            raise ValueError(f"samples must be a nonempty (n, a, b) array, got {X.shape}")
        object.__setattr__(self, "samples", X)
        if self.labels is not None:
            y = np.asarray(self.labels, dtype=int)
            if y.shape != (X.shape[0],):
                raise ValueError(f"labels must have shape ({X.shape[0]},), got {y.shape}")
            object.__setattr__(self, "labels", y)

    @property
    def n(self):
        return self.samples.shape[0]

    @property
    def a(self):
        return self.samples.shape[1]

    @property
    def b(self):
        return self.samples.shape[2]

    def flattened(self):
        """(n, a*b) view with each sample flattened column-major."""
        return self.samples.transpose(0, 2, 1).reshape(self.n, self.a * self.b)


def _fmt(x):
    return f"{x:.17g}"


def save_bundle(dataset, path):
    """Write a Dataset2D to the text bundle format."""
    lines = [
        "TSNMF-BUNDLE 1",
        f"{dataset.n} {dataset.a} {dataset.b} labels={int(dataset.labels is not None)}",
    ]
    for X in dataset.samples:
        for row in X:
            lines.append(" ".join(_fmt(v) for v in row))
    if dataset.labels is not None:
        lines.append(" ".join(str(int(v)) for v in dataset.labels))
    Path(path).write_text("\n".join(lines) + "\n")


def _load_bundle(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DatasetFormatError(f"cannot read {path}: {exc}") from exc
    lines = text.splitlines()
    if not lines or not lines[0].startswith("TSNMF-BUNDLE"):
        raise DatasetFormatError(f"{path}: missing TSNMF-BUNDLE header")
    if lines[0].split() != ["TSNMF-BUNDLE", "1"]:
        raise DatasetFormatError(f"{path}: unsupported bundle version {lines[0]!r}")
    try:
        n_s, a_s, b_s, lab_s = lines[1].split()
        n, a, b = int(n_s), int(a_s), int(b_s)
        has_labels = {"labels=0": False, "labels=1": True}[lab_s]
    except (IndexError, KeyError, ValueError) as exc:
        raise DatasetFormatError(f"{path}: malformed header line") from exc

    expected = 2 + n * a + int(has_labels)
    if len(lines) < expected:
        raise DatasetFormatError(f"{path}: expected {expected} lines, found {len(lines)}")
    samples = np.empty((n, a, b))
    pos = 2
    for i in range(n):
        for row in range(a):
            vals = lines[pos].split()
            if len(vals) != b:
                raise DatasetFormatError(
                    f"{path}: sample {i} row {row} has {len(vals)} values, expected {b}"
                )
            try:
                samples[i, row] = [float(v) for v in vals]
            except ValueError as exc:
                raise DatasetFormatError(f"{path}: bad number in sample {i}") from exc
            pos += 1
    labels = None
    if has_labels:
        vals = lines[pos].split()
        if len(vals) != n:
            raise DatasetFormatError(f"{path}: {len(vals)} labels, expected {n}")
        labels = np.array([int(v) for v in vals])
    return Dataset2D(samples=samples, labels=labels)


def _load_csv_matrix(path):
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.reader(fh):
            if not rec:
                continue
            try:
                rows.append([float(v) for v in rec])
            except ValueError as exc:
                raise DatasetFormatError(f"{path}: non-numeric entry") from exc
    if not rows:
        raise DatasetFormatError(f"{path}: empty CSV matrix")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise DatasetFormatError(f"{path}: ragged CSV matrix")
    return np.array(rows)


def _load_csv_dir(path, want_labels):
    root = Path(path)
    if not root.is_dir():
        raise DatasetFormatError(f"{path} is not a directory")
    files = sorted(p for p in root.glob("*.csv") if p.name != "labels.csv")
    if not files:
        raise DatasetFormatError(f"{path}: no sample CSV files found")
    mats = [_load_csv_matrix(p) for p in files]
    shape = mats[0].shape
    for p, M in zip(files, mats):
        if M.shape != shape:
            raise DatasetFormatError(f"{p}: shape {M.shape} differs from {shape}")
    labels = None
    labels_path = root / "labels.csv"
    if labels_path.exists():
        try:
            labels = np.array(
                [int(line) for line in labels_path.read_text().split()]
            )
        except ValueError as exc:
            raise DatasetFormatError(f"{labels_path}: non-integer label") from exc
        if len(labels) != len(mats):
            raise DatasetFormatError(
                f"{labels_path}: {len(labels)} labels for {len(mats)} samples"
            )
    elif want_labels:
        raise DatasetFormatError(f"{path}: labels.csv requested but missing")
    return Dataset2D(samples=np.stack(mats), labels=labels)


def load_dataset(path, format="bundle", want_labels=False):
    """Load a Dataset2D from disk; format is "bundle" or "csv-dir"."""
    if format == "bundle":
        ds = _load_bundle(path)
        if want_labels and ds.labels is None:
            raise DatasetFormatError(f"{path}: labels requested but bundle has none")
        return ds
    if format == "csv-dir":
        return _load_csv_dir(path, want_labels)
    raise ValueError(f"unknown dataset format {format!r}")


def sample_subset(dataset, n_classes, seed):
    """Keep all samples of n_classes randomly chosen labels, relabeled 0..N-1."""
    if dataset.labels is None:
        raise ValueError("sample_subset requires a labeled dataset")
    distinct = np.unique(dataset.labels)
    if not 1 <= n_classes <= distinct.size:
        raise ValueError(f"n_classes must be in [1, {distinct.size}], got {n_classes}")
    rng = np.random.default_rng(seed)
    chosen = rng.choice(distinct, size=n_classes, replace=False)
    mask = np.isin(dataset.labels, chosen)
    relabel = {int(c): i for i, c in enumerate(sorted(chosen))}
    new_labels = np.array([relabel[int(v)] for v in dataset.labels[mask]])
    return Dataset2D(samples=dataset.samples[mask].copy(), labels=new_labels)


def corrupt(dataset, fraction, seed):
    """Zero out exactly round(fraction * a * b) uniformly chosen entries per sample."""
    if not 0.0 <= fraction < 1.0:
        raise ValueError(f"fraction must be in [0, 1), got {fraction}")
    n, a, b = dataset.samples.shape
    n_zero = int(round(fraction * a * b))
    samples = dataset.samples.copy()
    rng = np.random.default_rng(seed)
    for i in range(n):
        idx = rng.choice(a * b, size=n_zero, replace=False)
        flat = samples[i].reshape(-1)
        flat[idx] = 0.0
    labels = None if dataset.labels is None else dataset.labels.copy()
    return Dataset2D(samples=samples, labels=labels)


def synth_clusters(k, n_per, a, b, noise_sigma, seed, scale_jitter=0.2):
    """Generate k clusters of noisy rank-1 matrices with known labels.

    Each cluster template is g_j h_j^T with mutually orthogonal unit vectors
    g_j (length a) and h_j (length b), so every template has unit Frobenius
    norm. A sample is its template scaled by 1 + U(-scale_jitter, scale_jitter)
    plus i.i.d. Gaussian noise of standard deviation noise_sigma per entry.
    """
    if k > min(a, b):
        raise ValueError(f"k={k} orthogonal templates impossible for a={a}, b={b}")
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be nonnegative")
    rng = np.random.default_rng(seed)
    G = np.linalg.qr(rng.standard_normal((a, k)))[0]  # orthonormal columns
    H = np.linalg.qr(rng.standard_normal((b, k)))[0]
    templates = np.einsum("aj,bj->jab", G, H)
    samples = np.empty((k * n_per, a, b))
    labels = np.repeat(np.arange(k), n_per)
    for idx, j in enumerate(labels):
        scale = 1.0 + rng.uniform(-scale_jitter, scale_jitter)
        samples[idx] = templates[j] * scale + rng.normal(0.0, noise_sigma, size=(a, b))
    return Dataset2D(samples=samples, labels=labels)
