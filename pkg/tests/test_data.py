import struct

import numpy as np
import pytest
from numpy.testing import assert_allclose

import kanprobe as kp


def small_set(n=7, d=3, c=2, seed=0):
    rng = np.random.default_rng(seed)
    return kp.EmbeddingSet(
        x=rng.normal(0, 1, (n, d)).astype(np.float32),
        y=rng.integers(0, c, n).astype(np.int64),
        n_classes=c, name="small",
    )


class TestEmbFormat:
    def test_round_trip_bitwise(self, tmp_path):
        data = small_set(20, 5, 3, seed=1)
        path = tmp_path / "a.emb"
        kp.save_emb(data, path)
        back = kp.load_emb(path)
        assert np.array_equal(back.x, data.x)
        assert np.array_equal(back.y, data.y)
        assert back.n_classes == 3
        assert back.x.dtype == np.float32

    def test_exact_file_length(self, tmp_path):
        data = kp.EmbeddingSet(x=np.array([[0.5, -0.5]], dtype=np.float32),
                               y=np.array([1], dtype=np.int64), n_classes=2)
        path = tmp_path / "tiny.emb"
        kp.save_emb(data, path)
        blob = path.read_bytes()
        assert len(blob) == 32  # 20-byte header + 2 f32 + 1 u32
        magic, version, n, d, c = struct.unpack("<4sIIII", blob[:20])
        assert magic == b"EMB1"
        assert (version, n, d, c) == (1, 1, 2, 2)
        assert struct.unpack("<2f", blob[20:28]) == (0.5, -0.5)
        assert struct.unpack("<I", blob[28:32]) == (1,)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.emb"
        path.write_bytes(b"XXXX" + b"\x00" * 28)
        with pytest.raises(ValueError, match="bad magic"):
            kp.load_emb(path)

    def test_bad_version(self, tmp_path):
        path = tmp_path / "v9.emb"
        path.write_bytes(struct.pack("<4sIIII", b"EMB1", 9, 0, 1, 1))
        with pytest.raises(ValueError, match="version"):
            kp.load_emb(path)

    def test_truncated_header(self, tmp_path):
        path = tmp_path / "short.emb"
        path.write_bytes(b"EMB1\x01\x00")
        with pytest.raises(ValueError, match="truncated"):
            kp.load_emb(path)

    def test_truncated_payload(self, tmp_path):
        data = small_set(4, 2, 2, seed=2)
        path = tmp_path / "cut.emb"
        kp.save_emb(data, path)
        blob = path.read_bytes()
        path.write_bytes(blob[:-5])
        with pytest.raises(ValueError, match="truncated"):
            kp.load_emb(path)

    def test_trailing_bytes(self, tmp_path):
        data = small_set(4, 2, 2, seed=3)
        path = tmp_path / "extra.emb"
        kp.save_emb(data, path)
        path.write_bytes(path.read_bytes() + b"\x00\x00")
        with pytest.raises(ValueError, match="trailing"):
            kp.load_emb(path)

    def test_label_out_of_range_on_load(self, tmp_path):
        # header declares 2 classes, label says 7
        blob = struct.pack("<4sIIII", b"EMB1", 1, 1, 1, 2) + struct.pack("<f", 0.0)
        blob += struct.pack("<I", 7)
        path = tmp_path / "range.emb"
        path.write_bytes(blob)
        with pytest.raises(ValueError, match="label|n_classes"):
            kp.load_emb(path)

    def test_zero_row_set(self, tmp_path):
        data = kp.EmbeddingSet(x=np.zeros((0, 4), dtype=np.float32),
                               y=np.zeros(0, dtype=np.int64), n_classes=3)
        path = tmp_path / "empty.emb"
        kp.save_emb(data, path)
        back = kp.load_emb(path)
        assert back.n == 0 and back.dim == 4 and back.n_classes == 3


class TestCsv:
    def _write(self, tmp_path, text):
        path = tmp_path / "t.csv"
        path.write_text(text)
        return path

    def test_single_row(self, tmp_path):
        path = self._write(tmp_path, "f0,f1,label\n1.0,2.0,0\n")
        data = kp.load_csv(path)
        assert data.n == 1 and data.dim == 2
        assert_allclose(data.x[0], [1.0, 2.0])
        assert data.y[0] == 0
        assert data.n_classes == 1

    def test_n_classes_inferred(self, tmp_path):
        path = self._write(tmp_path, "a,b,y\n0,0,0\n1,1,4\n")
        assert kp.load_csv(path).n_classes == 5

    def test_n_classes_override(self, tmp_path):
        path = self._write(tmp_path, "a,b,y\n0,0,0\n1,1,1\n")
        assert kp.load_csv(path, n_classes=10).n_classes == 10

    def test_header_only(self, tmp_path):
        data = kp.load_csv(self._write(tmp_path, "a,b,y\n"))
        assert data.n == 0 and data.dim == 2 and data.n_classes == 1

    def test_ragged_row_names_line(self, tmp_path):
        path = self._write(tmp_path, "a,b,y\n1,2,0\n1,2\n")
        with pytest.raises(ValueError, match="line 3"):
            kp.load_csv(path)

    def test_non_numeric_names_line(self, tmp_path):
        path = self._write(tmp_path, "a,b,y\n1,spam,0\n")
        with pytest.raises(ValueError, match="line 2"):
            kp.load_csv(path)

    def test_negative_label(self, tmp_path):
        path = self._write(tmp_path, "a,b,y\n1,2,-1\n")
        with pytest.raises(ValueError, match="negative"):
            kp.load_csv(path)

    def test_round_trip_through_emb(self, tmp_path):
        csv = "a,b,c,y\n0.125,-3.5,2.0,1\n7.25,0.0,-0.375,0\n1.5,2.5,3.5,2\n"
        src = kp.load_csv(self._write(tmp_path, csv))
        path = tmp_path / "rt.emb"
        kp.save_emb(src, path)
        back = kp.load_emb(path)
        # all values above are exactly representable in f32
        assert np.array_equal(back.x, src.x)
        assert np.array_equal(back.y, src.y)
        assert back.n_classes == src.n_classes


class TestGaussianClusters:
    def test_deterministic(self):
        a = kp.synth_gaussian_clusters(50, 6, 3, sep=2.0, seed=9)
        b = kp.synth_gaussian_clusters(50, 6, 3, sep=2.0, seed=9)
        assert np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y)

    def test_seed_changes_data(self):
        a = kp.synth_gaussian_clusters(50, 6, 3, sep=2.0, seed=9)
        b = kp.synth_gaussian_clusters(50, 6, 3, sep=2.0, seed=10)
        assert not np.array_equal(a.x, b.x)

    def test_balanced_counts(self):
        data = kp.synth_gaussian_clusters(103, 4, 5, sep=1.0, seed=0)
        counts = np.bincount(data.y, minlength=5)
        assert counts.sum() == 103
        assert counts.max() - counts.min() <= 1

    def test_sep_zero_centers_coincide(self):
        data = kp.synth_gaussian_clusters(6000, 4, 3, sep=0.0, seed=1)
        for c in range(3):
            mu = data.x[data.y == c].mean(axis=0)
            assert np.linalg.norm(mu) < 0.15  # ~3 sigma of the mean estimate

    def test_mean_norms_match_sep(self):
        sep = 5.0
        data = kp.synth_gaussian_clusters(30000, 8, 3, sep=sep, seed=2)
        for c in range(3):
            mu = data.x[data.y == c].mean(axis=0).astype(np.float64)
            assert abs(np.linalg.norm(mu) - sep) < 0.1

    def test_nearest_mean_accuracy_high_sep(self):
        data = kp.synth_gaussian_clusters(2000, 8, 2, sep=10.0, seed=3)
        means = np.stack([data.x[data.y == c].mean(axis=0) for c in range(2)])
        d2 = ((data.x[:, None, :] - means[None]) ** 2).sum(axis=2)
        acc = float(np.mean(np.argmin(d2, axis=1) == data.y))
        assert acc >= 0.999

    def test_too_few_samples(self):
        with pytest.raises(ValueError):
            kp.synth_gaussian_clusters(2, 4, 3, sep=1.0)


class TestPeriodic:
    def test_deterministic(self):
        a = kp.synth_periodic(100, 3, 2.0, seed=4)
        b = kp.synth_periodic(100, 3, 2.0, seed=4)
        assert np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y)

    def test_domain_and_classes(self):
        data = kp.synth_periodic(500, 4, 3.0, seed=5)
        assert data.n_classes == 2
        assert np.all(data.x >= -np.pi) and np.all(data.x <= np.pi)
        assert set(np.unique(data.y)) <= {0, 1}

    def test_labels_follow_rule(self):
        data = kp.synth_periodic(1000, 2, 3.0, seed=6)
        want = (np.sin(3.0 * data.x[:, 0].astype(np.float64)) > 0).astype(np.int64)
        assert np.array_equal(data.y, want)

    def test_freq1_zero_threshold_separates(self):
        data = kp.synth_periodic(5000, 3, 1.0, seed=7)
        assert np.array_equal(data.y, (data.x[:, 0] > 0).astype(np.int64))

    @staticmethod
    def _best_threshold_accuracy(x1, y):
        """Exact best accuracy of any rule of the form y = [x1 > t] or its flip."""
        order = np.argsort(x1, kind="stable")
        ys = y[order].astype(np.int64)
        n = ys.size
        ones_left = np.concatenate([[0], np.cumsum(ys)])  # ones among first i
        total_ones = ones_left[-1]
        idx = np.arange(n + 1)
        zeros_left = idx - ones_left
        # cut after position i: left -> 0, right -> 1
        correct_up = zeros_left + (total_ones - ones_left)
        # flipped polarity: left -> 1, right -> 0
        correct_down = ones_left + ((n - idx) - (total_ones - ones_left))
        return max(correct_up.max(), correct_down.max()) / n

    def test_freq3_not_threshold_separable(self):
        data = kp.synth_periodic(100_000, 1, 3.0, seed=8)
        acc = self._best_threshold_accuracy(data.x[:, 0], data.y)
        # three half-period sign flips cap any single threshold near 2/3
        assert acc <= 0.68
        assert acc >= 0.60

    def test_freq1_threshold_scan_reaches_one(self):
        data = kp.synth_periodic(20_000, 1, 1.0, seed=9)
        acc = self._best_threshold_accuracy(data.x[:, 0], data.y)
        assert acc == 1.0


class TestStratifiedSplit:
    def test_all_train(self):
        data = small_set(12, 3, 2, seed=11)
        train, val, test = kp.stratified_split(data, (1.0, 0.0, 0.0), seed=0)
        assert train.n == 12 and val.n == 0 and test.n == 0
        assert sorted(map(tuple, train.x.tolist())) == sorted(map(tuple, data.x.tolist()))

    def test_balanced_70_15_15(self):
        rng = np.random.default_rng(12)
        x = rng.normal(0, 1, (100, 4)).astype(np.float32)
        y = np.repeat([0, 1], 50).astype(np.int64)
        data = kp.EmbeddingSet(x=x, y=y, n_classes=2)
        train, val, test = kp.stratified_split(data, (0.7, 0.15, 0.15), seed=1)
        assert (train.n, val.n, test.n) == (70, 15, 15)
        assert np.array_equal(np.bincount(train.y), [35, 35])
        for part in (val, test):
            counts = np.bincount(part.y, minlength=2)
            assert counts.sum() == 15
            assert set(counts) <= {7, 8}

    def test_union_is_original_multiset(self):
        data = small_set(37, 3, 3, seed=13)
        parts = kp.stratified_split(data, (0.5, 0.25, 0.25), seed=2)
        rows = np.concatenate([p.x for p in parts])
        labels = np.concatenate([p.y for p in parts])
        joined = sorted(map(tuple, np.column_stack([rows, labels]).tolist()))
        original = sorted(map(tuple, np.column_stack([data.x, data.y]).tolist()))
        assert joined == original

    def test_per_class_proportionality(self):
        rng = np.random.default_rng(14)
        y = rng.integers(0, 4, 173).astype(np.int64)
        data = kp.EmbeddingSet(x=rng.normal(0, 1, (173, 2)).astype(np.float32),
                               y=y, n_classes=4)
        fractions = (0.6, 0.2, 0.2)
        parts = kp.stratified_split(data, fractions, seed=3)
        for c in range(4):
            total = int((y == c).sum())
            for part, f in zip(parts, fractions):
                got = int((part.y == c).sum())
                assert abs(got - f * total) < 1.0

    def test_deterministic(self):
        data = small_set(40, 3, 2, seed=15)
        a = kp.stratified_split(data, (0.7, 0.15, 0.15), seed=5)
        b = kp.stratified_split(data, (0.7, 0.15, 0.15), seed=5)
        for p, q in zip(a, b):
            assert np.array_equal(p.x, q.x) and np.array_equal(p.y, q.y)

    def test_small_class_rejected(self):
        data = kp.EmbeddingSet(x=np.zeros((4, 2), dtype=np.float32),
                               y=np.array([0, 0, 0, 1], dtype=np.int64), n_classes=2)
        with pytest.raises(ValueError):
            kp.stratified_split(data, (0.4, 0.3, 0.3), seed=0)

    def test_bad_fractions(self):
        data = small_set(10, 2, 2, seed=16)
        with pytest.raises(ValueError, match="sum"):
            kp.stratified_split(data, (0.5, 0.2, 0.2), seed=0)
        with pytest.raises(ValueError, match="non-negative"):
            kp.stratified_split(data, (1.2, -0.1, -0.1), seed=0)


class TestEmbeddingSetValidate:
    def test_label_over_range(self):
        with pytest.raises(ValueError):
            kp.EmbeddingSet(x=np.zeros((2, 2), dtype=np.float32),
                            y=np.array([0, 5], dtype=np.int64), n_classes=2).validate()

    def test_non_finite(self):
        with pytest.raises(ValueError, match="finite"):
            kp.EmbeddingSet(x=np.array([[np.inf, 0.0]], dtype=np.float32),
                            y=np.array([0], dtype=np.int64), n_classes=1).validate()

    def test_row_count_mismatch(self):
        with pytest.raises(ValueError):
            kp.EmbeddingSet(x=np.zeros((3, 2), dtype=np.float32),
                            y=np.zeros(2, dtype=np.int64), n_classes=1).validate()
