"""Regenerate the committed test fixtures: penguins bundle + API golden files.

Run from the repository root:

    python tools/build_golden.py

Output is deterministic (fixed seed, zeroed stage timings), so reruns only
change the fixtures when the numeric pipeline itself changes.
"""

from pathlib import Path

from fastapi.testclient import TestClient

import shaptour as st
from shaptour.service import create_app

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "tests" / "data"
GOLDEN = ROOT / "tests" / "golden"

BUNDLE_SEED = 42


def build_bundle() -> Path:
    ds = st.load_penguins()
    bundle = st.compute_bundle(ds, seed=BUNDLE_SEED, clock=lambda: 0.0)
    path = DATA / "penguins_bundle.json"
    st.save_bundle(bundle, path)
    print(f"wrote {path} ({path.stat().st_size} bytes)")
    return path


GOLDEN_REQUESTS = [
    ("health.json", "GET", "/api/health", None),
    ("meta.json", "GET", "/api/meta", None),
    ("attributions.json", "GET", "/api/attributions", None),
    ("global_predicted_class.json", "GET", "/api/global?color=predicted_class", None),
    ("global_log_maha_attr.json", "GET", "/api/global?color=log_maha_attr", None),
    ("obs_0.json", "GET", "/api/obs/0", None),
    ("obs_242.json", "GET", "/api/obs/242", None),
    ("selection.json", "POST", "/api/selection",
     {"indices": [242, 0, 242, 50]}),
    ("tour_default.json", "POST", "/api/tour",
     {"pi_index": 242, "manip_var": 2, "angle_step": 0.3}),
    ("tour_restricted.json", "POST", "/api/tour",
     {"pi_index": 242, "manip_var": 2, "include": [0, 2], "angle_step": 0.5}),
]


def build_golden(bundle_path: Path) -> None:
    GOLDEN.mkdir(exist_ok=True)
    app = create_app(st.load_bundle(bundle_path))
    client = TestClient(app)
    for name, method, url, body in GOLDEN_REQUESTS:
        resp = client.get(url) if method == "GET" else client.post(url, json=body)
        assert resp.status_code == 200, f"{url} -> {resp.status_code}: {resp.text[:200]}"
        out = GOLDEN / name
        out.write_bytes(resp.content)
        print(f"wrote {out} ({len(resp.content)} bytes)")


if __name__ == "__main__":
    build_golden(build_bundle())
