import numpy as np
import pytest

from tsnmf.data import (
    Dataset2D,
    DatasetFormatError,
    corrupt,
    load_dataset,
    sample_subset,
    save_bundle,
    synth_clusters,
)


# ------------------------------------------------------------------ bundles

def test_load_hand_written_bundle(tmp_path):
    path = tmp_path / "one.txt"
    path.write_text(
        "TSNMF-BUNDLE 1\n"
        "1 2 2 labels=0\n"
        "1 0\n"
        "0 1\n"
    )
    ds = load_dataset(path, format="bundle")
    assert ds.samples.shape == (1, 2, 2)
    assert np.array_equal(ds.samples[0], np.eye(2))
    assert ds.labels is None


def test_bundle_with_labels(tmp_path):
    path = tmp_path / "two.txt"
    path.write_text(
        "TSNMF-BUNDLE 1\n"
        "2 1 2 labels=1\n"
        "1 2\n"
        "3 4\n"
        "0 1\n"
    )
    ds = load_dataset(path, format="bundle", want_labels=True)
    assert np.array_equal(ds.samples, [[[1, 2]], [[3, 4]]])
    assert np.array_equal(ds.labels, [0, 1])


def test_bundle_round_trip_bit_identical(tmp_path):
    rng = np.random.default_rng(0)
    ds = Dataset2D(
        samples=rng.standard_normal((4, 3, 2)),
        labels=np.array([0, 1, 1, 0]),
    )
    path = tmp_path / "rt.txt"
    save_bundle(ds, path)
    loaded = load_dataset(path, format="bundle", want_labels=True)
    assert np.array_equal(loaded.samples, ds.samples)
    assert np.array_equal(loaded.labels, ds.labels)


def test_bundle_bad_header(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("NOT-A-BUNDLE\n")
    with pytest.raises(DatasetFormatError):
        load_dataset(path, format="bundle")


def test_bundle_truncated(tmp_path):
    path = tmp_path / "short.txt"
    path.write_text("TSNMF-BUNDLE 1\n2 2 2 labels=0\n1 0\n0 1\n")
    with pytest.raises(DatasetFormatError):
        load_dataset(path, format="bundle")


def test_bundle_ragged_row(tmp_path):
    path = tmp_path / "ragged.txt"
    path.write_text("TSNMF-BUNDLE 1\n1 2 2 labels=0\n1 0\n0 1 7\n")
    with pytest.raises(DatasetFormatError):
        load_dataset(path, format="bundle")


def test_bundle_missing_labels_when_requested(tmp_path):
    path = tmp_path / "nolab.txt"
    path.write_text("TSNMF-BUNDLE 1\n1 1 1 labels=0\n5\n")
    with pytest.raises(DatasetFormatError):
        load_dataset(path, format="bundle", want_labels=True)


# ------------------------------------------------------------------ csv dirs

def test_csv_dir_lexicographic_order(tmp_path):
    for name, value in [("b.csv", 2.0), ("a.csv", 1.0), ("c.csv", 3.0)]:
        (tmp_path / name).write_text(f"{value},0\n0,{value}\n")
    ds = load_dataset(tmp_path, format="csv-dir")
    assert ds.samples.shape == (3, 2, 2)
    assert [s[0, 0] for s in ds.samples] == [1.0, 2.0, 3.0]


def test_csv_dir_labels_file(tmp_path):
    (tmp_path / "a.csv").write_text("1,2\n")
    (tmp_path / "b.csv").write_text("3,4\n")
    (tmp_path / "labels.csv").write_text("1\n0\n")
    ds = load_dataset(tmp_path, format="csv-dir", want_labels=True)
    assert np.array_equal(ds.labels, [1, 0])
    assert ds.samples.shape == (2, 1, 2)


def test_csv_dir_missing_labels(tmp_path):
    (tmp_path / "a.csv").write_text("1,2\n")
    with pytest.raises(DatasetFormatError):
        load_dataset(tmp_path, format="csv-dir", want_labels=True)


def test_csv_dir_inconsistent_shapes(tmp_path):
    (tmp_path / "a.csv").write_text("1,2\n")
    (tmp_path / "b.csv").write_text("1,2,3\n")
    with pytest.raises(DatasetFormatError):
        load_dataset(tmp_path, format="csv-dir")


# ------------------------------------------------------------------- subsets

def labeled_dataset():
    rng = np.random.default_rng(1)
    return Dataset2D(
        samples=rng.standard_normal((12, 2, 2)),
        labels=np.repeat([0, 1, 2, 3], 3),
    )


def test_subset_all_classes_is_relabled_full_set():
    ds = labeled_dataset()
    sub = sample_subset(ds, 4, seed=0)
    assert sub.samples.shape == ds.samples.shape
    assert sorted(set(sub.labels)) == [0, 1, 2, 3]


def test_subset_single_class():
    ds = labeled_dataset()
    sub = sample_subset(ds, 1, seed=3)
    assert set(sub.labels) == {0}
    assert sub.samples.shape == (3, 2, 2)


def test_subset_deterministic():
    ds = labeled_dataset()
    s1 = sample_subset(ds, 2, seed=9)
    s2 = sample_subset(ds, 2, seed=9)
    assert np.array_equal(s1.samples, s2.samples)
    assert np.array_equal(s1.labels, s2.labels)


def test_subset_relabels_contiguously():
    ds = labeled_dataset()
    sub = sample_subset(ds, 2, seed=1)
    assert sorted(set(sub.labels)) == [0, 1]


def test_subset_requires_labels():
    ds = Dataset2D(samples=np.zeros((2, 1, 1)), labels=None)
    with pytest.raises(ValueError):
        sample_subset(ds, 1, seed=0)


def test_subset_does_not_mutate_input():
    ds = labeled_dataset()
    before = ds.samples.copy()
    sample_subset(ds, 2, seed=0)
    assert np.array_equal(ds.samples, before)


# ---------------------------------------------------------------- corruption

def test_corrupt_zero_fraction_noop():
    ds = labeled_dataset()
    out = corrupt(ds, 0.0, seed=0)
    assert np.array_equal(out.samples, ds.samples)


def test_corrupt_half_of_2x2():
    ds = Dataset2D(samples=np.ones((3, 2, 2)), labels=None)
    out = corrupt(ds, 0.5, seed=0)
    for sample in out.samples:
        assert np.count_nonzero(sample == 0) == 2


def test_corrupt_aggregate_count():
    rng = np.random.default_rng(2)
    ds = Dataset2D(samples=rng.random((5, 4, 5)) + 1.0, labels=None)
    out = corrupt(ds, 0.4, seed=7)
    expected_per_sample = round(0.4 * 4 * 5)
    assert np.count_nonzero(out.samples == 0) == expected_per_sample * 5


def test_corrupt_deterministic_and_pure():
    ds = labeled_dataset()
    before = ds.samples.copy()
    o1 = corrupt(ds, 0.4, seed=5)
    o2 = corrupt(ds, 0.4, seed=5)
    assert np.array_equal(o1.samples, o2.samples)
    assert np.array_equal(ds.samples, before)


def test_corrupt_rejects_bad_fraction():
    ds = labeled_dataset()
    for frac in (-0.1, 1.0, 1.5):
        with pytest.raises(ValueError):
            corrupt(ds, frac, seed=0)


# ----------------------------------------------------------------- synthesis

def test_synth_noiseless_equals_templates():
    ds = synth_clusters(3, 4, 5, 5, noise_sigma=0.0, seed=0, scale_jitter=0.0)
    for j in range(3):
        block = ds.samples[ds.labels == j]
        assert np.allclose(block, block[0], atol=1e-14)
        assert np.linalg.norm(block[0]) == pytest.approx(1.0, abs=1e-12)


def test_synth_templates_unit_norm_and_orthogonal():
    ds = synth_clusters(4, 1, 6, 6, noise_sigma=0.0, seed=1, scale_jitter=0.0)
    flats = ds.samples.reshape(4, -1)
    gram = flats @ flats.T
    assert np.allclose(gram, np.eye(4), atol=1e-10)


def test_synth_labels_and_shape():
    ds = synth_clusters(2, 5, 3, 4, noise_sigma=0.1, seed=2)
    assert ds.samples.shape == (10, 3, 4)
    assert np.array_equal(np.sort(ds.labels), np.repeat([0, 1], 5))


def test_synth_deterministic():
    d1 = synth_clusters(3, 4, 5, 6, noise_sigma=0.2, seed=11)
    d2 = synth_clusters(3, 4, 5, 6, noise_sigma=0.2, seed=11)
    assert np.array_equal(d1.samples, d2.samples)


def test_synth_rejects_too_many_clusters():
    with pytest.raises(ValueError):
        synth_clusters(4, 2, 3, 5, noise_sigma=0.0, seed=0)


def test_synth_nearest_template_separable():
    ds = synth_clusters(3, 50, 10, 10, noise_sigma=0.05, seed=3)
    templates = synth_clusters(
        3, 1, 10, 10, noise_sigma=0.0, seed=3, scale_jitter=0.0
    )
    t_flat = templates.samples.reshape(3, -1)
    order = templates.labels
    correct = 0
    for sample, label in zip(ds.samples, ds.labels):
        dists = np.linalg.norm(t_flat - sample.reshape(-1), axis=1)
        correct += order[np.argmin(dists)] == label
    assert correct == 150


def test_flattened_is_column_major():
    ds = Dataset2D(samples=np.array([[[1.0, 2.0], [3.0, 4.0]]]), labels=None)
    assert np.array_equal(ds.flattened(), [[1.0, 3.0, 2.0, 4.0]])
