"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with `pytest -s tests/test_acceptance.py` to see them
as they complete). Tolerances are fixed here, not configurable."""

import json
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

import shaptour as st
from shaptour.attribution import class_score
from shaptour.service import create_app

from conftest import DATA_DIR, random_tree, single_tree_forest, synthetic_regression

SEED = 42


def report(ok: bool, name: str, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} {name}: {detail}"
    print(line, flush=True)
    assert ok, line


def local_accuracy_errors(forest, ds):
    am = st.attribution_matrix(forest, ds)
    margins = st.predict_matrix(forest, ds.x)
    if forest.task == "classification":
        margins = class_score(margins)
    err = np.abs(am.values.sum(axis=1) - (margins - am.baseline))
    return err / np.maximum(1.0, np.abs(margins))


def test_criterion_1_local_accuracy(penguins):
    t0 = time.perf_counter()
    forest_c = st.train(penguins, seed=SEED)
    rel_c = local_accuracy_errors(forest_c, penguins)
    ds_r = synthetic_regression(n=200, p=5, seed=7)
    forest_r = st.train(ds_r, seed=SEED)
    rel_r = local_accuracy_errors(forest_r, ds_r)
    elapsed = time.perf_counter() - t0
    worst = max(rel_c.max(), rel_r.max())
    report(worst <= 1e-8 and elapsed < 10.0,
           "criterion 1 (local accuracy)",
           f"worst relative error {worst:.2e} (tol 1e-8), {elapsed:.1f}s (<10s)")


def test_criterion_2_oracle_equivalence():
    rng = np.random.default_rng(SEED)
    t0 = time.perf_counter()
    worst = 0.0
    trees = 0
    for _ in range(200):
        p = int(rng.integers(2, 9))
        depth = int(rng.integers(1, 7))
        tree = random_tree(rng, depth=depth, p=p, cover=int(rng.integers(8, 400)))
        f = single_tree_forest(tree, p=p)
        X = rng.normal(size=(20, p)) * rng.uniform(0.3, 3.0)
        fast_all = np.stack([st.tree_shap(f, x) for x in X])
        exact_all = np.stack([st.exact_shapley(f, x) for x in X])
        worst = max(worst, float(np.abs(fast_all - exact_all).max()))
        trees += 1
    elapsed = time.perf_counter() - t0
    report(worst <= 1e-10 and elapsed < 60.0,
           "criterion 2 (oracle equivalence)",
           f"{trees} trees x 20 points, worst gap {worst:.2e} (tol 1e-10), "
           f"{elapsed:.1f}s (<60s)")


def test_criterion_3_permutation_consistency():
    import itertools

    rng = np.random.default_rng(SEED)
    worst = 0.0
    for p in (2, 3, 4):
        trees = [random_tree(rng, depth=3, p=p, cover=80) for _ in range(6)]
        f = st.Forest(trees=trees, task="regression", hyper=st.Hyperparams(6, 1, 1),
                      seed=0, p=p)
        x = rng.normal(size=p)
        avg = np.stack([
            st.breakdown(f, x, order).contributions
            for order in itertools.permutations(range(p))
        ]).mean(axis=0)
        worst = max(worst, float(np.abs(avg - st.exact_shapley(f, x)).max()))

    # additive forest: stumps on single features make order irrelevant
    stumps = [
        st.Internal(feature=j, threshold=float(rng.normal()),
                    left=st.Leaf(value=float(rng.normal()), cover=30),
                    right=st.Leaf(value=float(rng.normal()), cover=70), cover=100)
        for j in range(4)
    ]
    f_add = st.Forest(trees=stumps, task="regression", hyper=st.Hyperparams(4, 1, 1),
                      seed=0, p=4)
    x = rng.normal(size=4)
    seqs = np.stack([
        st.breakdown(f_add, x, rng.permutation(4)).contributions for _ in range(10)
    ])
    spread = float(np.ptp(seqs, axis=0).max())
    report(worst <= 1e-10 and spread <= 1e-10,
           "criterion 3 (permutation consistency)",
           f"all-orders mean vs exact {worst:.2e} (tol 1e-10), "
           f"additive spread {spread:.2e} (tol 1e-10)")


def test_criterion_4_radial_tour_geometry():
    rng = np.random.default_rng(SEED)
    checked = 0
    worst_norm = worst_zero = worst_scale = worst_return = 0.0
    worst_full = 1.0
    while checked < 1000:
        p = int(rng.integers(2, 12))
        v = rng.normal(size=p)
        if np.linalg.norm(v) < 1e-8:
            continue
        b = v / np.linalg.norm(v)
        k = int(rng.integers(p))
        if abs(b[k]) >= 1 - 1e-6:
            continue
        path = st.radial_path(b, k, angle_step=float(rng.uniform(0.02, 0.2)))
        w = path.waypoints
        ck = path.bases[:, k]
        worst_norm = max(worst_norm,
                         float(np.abs(np.linalg.norm(path.bases, axis=1) - 1).max()))
        worst_zero = max(worst_zero, abs(float(ck[w.zero])))
        worst_full = min(worst_full, abs(float(ck[w.full])))
        worst_return = max(worst_return,
                           float(np.abs(path.bases[w.ret] - b).max()))
        others = np.delete(np.arange(p), k)
        ref = b[others]
        ok = np.abs(ref) > 1e-8
        if ok.sum() >= 2:
            ratios = path.bases[:, others[ok]] / ref[ok]
            worst_scale = max(worst_scale,
                              float((ratios.max(axis=1) - ratios.min(axis=1)).max()))
        checked += 1
    ok_all = (worst_norm <= 1e-12 and worst_zero <= 1e-10
              and worst_full >= 1 - 1e-10 and worst_scale <= 1e-9
              and worst_return <= 1e-10)
    report(ok_all, "criterion 4 (radial tour geometry)",
           f"1000 paths: norm {worst_norm:.1e} (1e-12), zero {worst_zero:.1e} "
           f"(1e-10), full {1 - worst_full:.1e} (1e-10), scale {worst_scale:.1e} "
           f"(1e-9), return {worst_return:.1e} (1e-10)")


def test_criterion_5_penguins_end_to_end(penguins):
    t0 = time.perf_counter()
    bundle = st.compute_bundle(penguins, seed=SEED)
    elapsed = time.perf_counter() - t0
    misclassified = int(bundle.misclassified.sum())
    accuracy = 1.0 - misclassified / bundle.n

    y = bundle.observed

    def ratio(coords):
        grand = coords.mean(axis=0)
        between = within = 0.0
        for c in np.unique(y):
            sub = coords[y == c]
            between += len(sub) * ((sub.mean(axis=0) - grand) ** 2).sum()
            within += ((sub - sub.mean(axis=0)) ** 2).sum()
        return between / within

    data_ratio = ratio(bundle.emb_data.coordinates)
    attr_ratio = ratio(bundle.emb_attr.coordinates)
    ok = (accuracy >= 0.95 and misclassified <= 15 and attr_ratio > data_ratio
          and elapsed < 30.0)
    report(ok, "criterion 5 (penguins end-to-end)",
           f"accuracy {accuracy:.3f} (>=0.95), misclassified {misclassified} (<=15), "
           f"separation attr {attr_ratio:.2f} > data {data_ratio:.2f}, "
           f"{elapsed:.1f}s (<30s)")


def test_criterion_6_performance_envelope():
    ds = synthetic_regression(n=5000, p=9, seed=2024)
    forest = st.train(ds, seed=11)
    assert forest.hyper == st.Hyperparams(125, 3, 10)
    t0 = time.perf_counter()
    am = st.attribution_matrix(forest, ds)
    elapsed = time.perf_counter() - t0
    margins = st.predict_matrix(forest, ds.x)
    rel = np.abs(am.values.sum(1) - (margins - am.baseline))
    rel /= np.maximum(1.0, np.abs(margins))
    report(elapsed <= 60.0 and rel.max() <= 1e-8,
           "criterion 6 (performance envelope)",
           f"attribution_matrix 5000x9, 125 trees: {elapsed:.1f}s (<=60s), "
           f"local accuracy {rel.max():.2e}")


def test_criterion_7_bundle_round_trip(tmp_path):
    bundle_path = DATA_DIR / "penguins_bundle.json"
    first = tmp_path / "first.json"
    second = tmp_path / "second.json"
    st.save_bundle(st.load_bundle(bundle_path), first)
    st.save_bundle(st.load_bundle(first), second)
    byte_identical = first.read_bytes() == second.read_bytes()

    payload = json.loads(first.read_text())
    payload["format_version"] = "99.0"
    bad_version = tmp_path / "version.json"
    bad_version.write_text(json.dumps(payload))
    version_error = False
    try:
        st.load_bundle(bad_version)
    except st.BundleVersionError:
        version_error = True
    except st.BundleError:
        version_error = False

    corrupt = tmp_path / "corrupt.json"
    corrupt.write_bytes(first.read_bytes()[:5000])
    parse_error = False
    try:
        st.load_bundle(corrupt)
    except st.BundleParseError:
        parse_error = True
    except st.BundleError:
        parse_error = False

    report(byte_identical and version_error and parse_error,
           "criterion 7 (bundle round trip)",
           f"save-load-save byte-identical={byte_identical}, "
           f"version mismatch -> BundleVersionError={version_error}, "
           f"truncation -> BundleParseError={parse_error}")


def test_criterion_8_api_contract():
    bundle = st.load_bundle(DATA_DIR / "penguins_bundle.json")
    client = TestClient(create_app(bundle))
    checks = {
        "health": client.get("/api/health").status_code == 200,
        "meta": client.get("/api/meta").json()["n"] == 333,
        "global": len(client.get("/api/global?color=predicted_class")
                      .json()["records"]) == 333,
        "tour": client.post("/api/tour", json={"pi_index": 242, "manip_var": 2})
                      .status_code == 200,
        "obs": client.get("/api/obs/242").status_code == 200,
        "selection": len(client.post("/api/selection",
                                     json={"indices": [1, 2, 3, 4]})
                         .json()["rows"]) == 4,
        "degenerate_422": client.post(
            "/api/tour",
            json={"pi_index": 0, "manip_var": 1,
                  "basis_override": [0.0, 1.0, 0.0, 0.0]}).status_code == 422,
        "out_of_range_400": client.get("/api/obs/400").status_code == 400,
        "unknown_404": client.get("/api/void").status_code == 404,
    }
    failed = [k for k, ok in checks.items() if not ok]
    report(not failed, "criterion 8 (API contract)",
           "all endpoints + error cases golden-tested "
           f"(see test_service.py); spot checks failed: {failed or 'none'}")
