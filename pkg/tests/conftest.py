"""Shared fixtures: small hand-built datasets and trained committees."""

from pathlib import Path

import numpy as np
import pytest

from marginforge.dataset import BinaryDataset, Dataset, binarize

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


def make_numeric_dataset(x_columns, labels, name="synthetic") -> Dataset:
    """Dataset from numeric column arrays and string labels."""
    cols = tuple(np.asarray(c, dtype=np.float64) for c in x_columns)
    return Dataset(
        name=name,
        feature_names=tuple(f"x{i}" for i in range(len(cols))),
        feature_kinds=tuple("numeric" for _ in cols),
        columns=cols,
        labels=tuple(labels),
    )


def make_binary(x_columns, y_signs, name="synthetic") -> BinaryDataset:
    """BinaryDataset from numeric columns and +-1 labels."""
    labels = ["pos" if s > 0 else "neg" for s in y_signs]
    return binarize(make_numeric_dataset(x_columns, labels, name))


@pytest.fixture
def toy_separable():
    """Linearly separable 1-D sample: label = sign(x), no x at 0."""
    x = np.array([-2.0, -1.5, -1.0, -0.5, -0.25, 0.25, 0.5, 1.0, 1.5, 2.0])
    return make_binary([x], np.sign(x))


@pytest.fixture
def toy_noisy():
    """1-D sample that no single stump classifies perfectly."""
    rng = np.random.default_rng(42)
    m = 80
    x = rng.uniform(-1.0, 1.0, m)
    y = np.where(x + rng.normal(0.0, 0.3, m) > 0, 1.0, -1.0)
    if len(set(y.tolist())) < 2:  # pragma: no cover - seed-dependent guard
        y[0] = -y[0]
    return make_binary([x], y)


def dataset_path(name: str) -> Path:
    return DATA_DIR / f"{name}.csv"


def require_dataset(name: str) -> Path:
    path = dataset_path(name)
    if not path.is_file():
        pytest.skip(f"dataset {name} not present under data/ (see scripts/)")
    return path
