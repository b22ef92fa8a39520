import json

import numpy as np
import pytest

import shaptour as st
from shaptour.errors import ShaptourError

from conftest import synthetic_regression


def fake_clock():
    t = [0.0]

    def tick():
        t[0] += 0.001
        return t[0]

    return tick


@pytest.fixture(scope="module")
def penguins_bundle(penguins):
    return st.compute_bundle(penguins, hyper=st.Hyperparams(25, 2, 1), seed=42,
                             clock=fake_clock())


@pytest.fixture(scope="module")
def regression_bundle():
    ds = synthetic_regression(n=120, p=4, seed=31)
    return st.compute_bundle(ds, hyper=st.Hyperparams(20, 2, 5), seed=8,
                             clock=fake_clock())


class TestComputeBundle:
    def test_penguins_shapes(self, penguins_bundle):
        b = penguins_bundle
        assert b.attr_values.shape == (333, 4)
        assert b.emb_data.coordinates.shape == (333, 2)
        assert b.emb_attr.coordinates.shape == (333, 2)
        assert b.task == "classification"
        assert set(b.timings_ms) == {"train", "attribution", "scale", "pca",
                                     "statistics", "total"}
        assert all(v >= 0 for v in b.timings_ms.values())

    def test_misclassified_flags_consistent(self, penguins_bundle):
        b = penguins_bundle
        assert np.array_equal(b.misclassified,
                              b.predicted != b.observed)

    def test_normalized_rows_unit_or_flagged(self, penguins_bundle):
        norms = np.linalg.norm(penguins_bundle.attr_normalized, axis=1)
        flagged = penguins_bundle.attr_zero_rows
        assert np.allclose(norms[~flagged], 1.0, atol=1e-9)

    def test_determinism_with_injected_clock(self, penguins, tmp_path):
        kwargs = dict(hyper=st.Hyperparams(10, 2, 1), seed=5)
        a = st.compute_bundle(penguins, clock=fake_clock(), **kwargs)
        b = st.compute_bundle(penguins, clock=fake_clock(), **kwargs)
        pa, pb = tmp_path / "a.json", tmp_path / "b.json"
        st.save_bundle(a, pa)
        st.save_bundle(b, pb)
        assert pa.read_bytes() == pb.read_bytes()

    def test_attribution_space_separates_better(self, penguins_bundle):
        b = penguins_bundle
        y = b.observed

        def ratio(coords):
            grand = coords.mean(axis=0)
            between = within = 0.0
            for c in np.unique(y):
                sub = coords[y == c]
                between += len(sub) * ((sub.mean(axis=0) - grand) ** 2).sum()
                within += ((sub - sub.mean(axis=0)) ** 2).sum()
            return between / within

        assert ratio(b.emb_attr.coordinates) > ratio(b.emb_data.coordinates)

    def test_stage_errors_are_tagged(self, penguins, monkeypatch):
        import shaptour.pipeline as pipeline

        def boom(*args, **kwargs):
            raise ShaptourError("deliberate")

        monkeypatch.setattr(pipeline, "attribution_matrix", boom)
        with pytest.raises(st.PipelineStageError, match="attribution"):
            st.compute_bundle(penguins, hyper=st.Hyperparams(2, 2, 1), seed=0)

    def test_regression_residuals(self, regression_bundle):
        b = regression_bundle
        assert np.allclose(b.residuals, b.observed - b.predicted, atol=1e-12)
        assert "residual" in b.statistics
        assert "predicted_class" not in b.statistics


class TestLogMahalanobis:
    def test_euclidean_special_case(self):
        d = st.mahalanobis_distances(np.array([[3.0, 4.0]]), np.eye(2))
        assert np.log(d[0]) == pytest.approx(np.log(5.0), abs=1e-12)

    def test_center_row_hits_floor(self):
        # symmetric pairs around c plus c itself: the mean is exactly c, so
        # the last row's centered value is zero and its log distance floors
        c = np.array([2.0, -1.0])
        v, w = np.array([1.0, 0.5]), np.array([-0.25, 2.0])
        data = np.vstack([c + v, c - v, c + w, c - w, c])
        values = st.log_mahalanobis(data)
        assert values[-1] == pytest.approx(np.log(1e-12))

    def test_exact_floor_for_constant_matrix(self):
        values = st.log_mahalanobis(np.ones((10, 3)))
        assert np.allclose(values, np.log(1e-12))

    def test_matches_bruteforce_inverse(self):
        rng = np.random.default_rng(12)
        z = rng.normal(size=(50, 3)) * [2.0, 0.5, 1.5]
        ours = st.log_mahalanobis(z)
        centered = z - z.mean(axis=0)
        cov = centered.T @ centered / 49
        lam = 1e-8 * np.trace(cov) / 3
        inv = np.linalg.inv(cov + lam * np.eye(3))
        brute = np.log(np.maximum(np.sqrt((centered @ inv * centered).sum(axis=1)),
                                  1e-12))
        assert np.allclose(ours, brute, atol=1e-8)


class TestBundleSerialization:
    def test_round_trip_equality(self, penguins_bundle, tmp_path):
        path = tmp_path / "bundle.json"
        st.save_bundle(penguins_bundle, path)
        loaded = st.load_bundle(path)
        assert loaded.task == penguins_bundle.task
        assert np.array_equal(loaded.x, penguins_bundle.x)
        assert np.array_equal(loaded.attr_values, penguins_bundle.attr_values)
        assert loaded.timings_ms == penguins_bundle.timings_ms

    def test_save_load_save_byte_identical(self, regression_bundle, tmp_path):
        p1, p2 = tmp_path / "one.json", tmp_path / "two.json"
        st.save_bundle(regression_bundle, p1)
        st.save_bundle(st.load_bundle(p1), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_top_level_keys_exact(self, penguins_bundle, tmp_path):
        path = tmp_path / "bundle.json"
        st.save_bundle(penguins_bundle, path)
        payload = json.loads(path.read_text())
        assert set(payload) == {"format_version", "task", "dataset", "model",
                                "attribution", "embeddings", "statistics",
                                "timings_ms"}

    def test_unknown_major_version_rejected(self, penguins_bundle, tmp_path):
        path = tmp_path / "bundle.json"
        st.save_bundle(penguins_bundle, path)
        payload = json.loads(path.read_text())
        payload["format_version"] = "99.0"
        path.write_text(json.dumps(payload))
        with pytest.raises(st.BundleVersionError):
            st.load_bundle(path)

    def test_unknown_extra_fields_ignored(self, penguins_bundle, tmp_path):
        path = tmp_path / "bundle.json"
        st.save_bundle(penguins_bundle, path)
        payload = json.loads(path.read_text())
        payload["future_extension"] = {"anything": 1}
        payload["dataset"]["another"] = [1, 2, 3]
        path.write_text(json.dumps(payload))
        loaded = st.load_bundle(path)
        assert loaded.n == penguins_bundle.n

    def test_truncated_file_is_parse_error(self, penguins_bundle, tmp_path):
        path = tmp_path / "bundle.json"
        st.save_bundle(penguins_bundle, path)
        blob = path.read_bytes()
        path.write_bytes(blob[: len(blob) // 2])
        with pytest.raises(st.BundleParseError):
            st.load_bundle(path)

    def test_invariant_violation_distinct_error(self, penguins_bundle, tmp_path):
        path = tmp_path / "bundle.json"
        st.save_bundle(penguins_bundle, path)
        payload = json.loads(path.read_text())
        payload["attribution"]["normalized"][0] = [9.0, 9.0, 9.0, 9.0]
        path.write_text(json.dumps(payload))
        with pytest.raises(st.BundleInvariantError):
            st.load_bundle(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(st.BundleParseError, match="no such file"):
            st.load_bundle(tmp_path / "absent.json")
