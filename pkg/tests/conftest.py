from pathlib import Path

import numpy as np
import pytest

import shaptour as st

DATA_DIR = Path(__file__).parent / "data"
GOLDEN_DIR = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def penguins() -> st.Dataset:
    return st.load_penguins()


@pytest.fixture(scope="session")
def penguins_forest(penguins) -> st.Forest:
    # small but accurate forest for unit tests; acceptance uses full defaults
    return st.train(penguins, st.Hyperparams(n_trees=25, mtry=2, min_node=1), seed=42)


def synthetic_regression(n=200, p=5, seed=99) -> st.Dataset:
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, p))
    y = 10 * np.sin(np.pi * x[:, 0] * x[:, 1])
    if p > 2:
        y = y + 20 * (x[:, 2] - 0.5) ** 2
    for j in range(3, p):
        y = y + (12 - 2 * j) * x[:, j]
    y = y + rng.normal(scale=1.0, size=n)
    return st.Dataset(
        name=f"synthetic-{n}x{p}",
        x=x,
        feature_names=tuple(f"x{j}" for j in range(p)),
        row_labels=tuple(str(i + 1) for i in range(n)),
        response=st.Response("quantitative", y),
    )


@pytest.fixture(scope="session")
def synth_regression() -> st.Dataset:
    return synthetic_regression()


def random_tree(rng, depth: int, p: int, cover: int, n_classes: int = 0):
    """Random valid tree: covers conserve, leaf values random."""
    if depth == 0 or cover < 2:
        if n_classes:
            probs = rng.dirichlet(np.ones(n_classes))
            return st.Leaf(value=probs, cover=cover)
        return st.Leaf(value=float(rng.normal()), cover=cover)
    left_cover = int(rng.integers(1, cover))
    return st.Internal(
        feature=int(rng.integers(p)),
        threshold=float(rng.normal()),
        left=random_tree(rng, depth - 1, p, left_cover, n_classes),
        right=random_tree(rng, depth - 1, p, cover - left_cover, n_classes),
        cover=cover,
    )


def single_tree_forest(tree, p, task="regression", levels=None) -> st.Forest:
    return st.Forest(trees=[tree], task=task, hyper=st.Hyperparams(1, 1, 1),
                     seed=0, p=p, class_levels=levels)
