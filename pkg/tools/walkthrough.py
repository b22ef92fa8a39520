"""Guided end-to-end exploration of a suspicious penguin prediction.

Reproduces the misclassification-hunting workflow against the bundled
penguins data, entirely through the library:

1. fit the forest and precompute the bundle;
2. pick the primary investigation (PI): the lowest-confidence prediction
   (a misclassified row when one exists);
3. pick the comparison investigation (CI): the nearest confident,
   correctly-classified neighbor in data space;
4. start a radial tour from the PI's attribution projection and sweep each
   variable's contribution, reporting how strongly the PI's projected score
   moves relative to the CI's.

Run:  python tools/walkthrough.py  [seed]
"""

import sys

import numpy as np

import shaptour as st


def main(seed: int = 42) -> None:
    ds = st.load_penguins()
    print(f"dataset: {ds.name}  n={ds.n}  p={ds.p}  levels={ds.response.levels}")
    bundle = st.compute_bundle(ds, seed=seed)
    probs = bundle.class_probs
    observed = bundle.observed
    predicted = bundle.predicted

    confidence = probs.max(axis=1)
    wrong = np.nonzero(bundle.misclassified)[0]
    pi = int(wrong[np.argmin(confidence[wrong])]) if wrong.size else int(np.argmin(confidence))
    why = "misclassified" if wrong.size else "lowest-confidence"
    print(f"\nPI: row {bundle.row_labels[pi]} ({why}) "
          f"observed={bundle.levels[observed[pi]]} "
          f"predicted={bundle.levels[predicted[pi]]} "
          f"confidence={confidence[pi]:.3f}")

    scaled = bundle.scaled
    eligible = (~bundle.misclassified) & (confidence > 0.9)
    eligible[pi] = False
    dist = np.linalg.norm(scaled - scaled[pi], axis=1)
    dist[~eligible] = np.inf
    ci = int(np.argmin(dist))
    print(f"CI: row {bundle.row_labels[ci]} (nearest confident neighbor) "
          f"observed={bundle.levels[observed[ci]]} "
          f"predicted={bundle.levels[predicted[ci]]}")

    basis = st.attribution_to_basis(bundle.attr_values[pi])
    print("\nPI attribution projection (unit norm):")
    for name, c in zip(bundle.feature_names, basis):
        print(f"  {name:>20}: {c:+.3f}")

    print("\nradial sweeps (projected score of PI vs CI at the waypoints):")
    for k, name in enumerate(bundle.feature_names):
        try:
            path = st.radial_path(basis, k)
        except st.DegenerateBasisError as exc:
            print(f"  {name:>20}: skipped ({exc})")
            continue
        w = path.waypoints
        score = scaled @ path.bases[[w.start, w.full, w.zero]].T
        spread = score[pi] - score[ci]
        print(f"  {name:>20}: PI-CI gap  start {spread[0]:+.2f}  "
              f"full {spread[1]:+.2f}  zero {spread[2]:+.2f}")
    print("\nA variable whose gap collapses (or flips) when its contribution is"
          "\nremoved is one the prediction leans on; inspect it in the viewer"
          "\nwith:  shaptour serve --bundle <bundle.json>")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 42)
