"""Decision stumps: the finite hypothesis space and the weighted weak learner.

A stump tests a single feature, either ``value <= threshold`` (numeric) or
``value == category`` (categorical), and multiplies the test outcome by a
polarity in {-1, +1}.  The two constant classifiers always belong to the
space, so the best weighted edge is never negative.  Thresholds are
canonicalized to midpoints of consecutive distinct observed values, which
makes the space finite and its size well-defined.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .dataset import BinaryDataset, CATEGORICAL, NUMERIC

CONSTANT = "constant"

WEIGHT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Stump:
    feature: int  # -1 for the constant classifiers
    kind: str  # "numeric" | "categorical" | "constant"
    threshold: float | None
    category: str | None
    polarity: int

    def predict(self, columns) -> np.ndarray:
        """Vectorized +-1 predictions over a dataset's column arrays."""
        if self.kind == CONSTANT:
            m = len(columns[0])
            return np.full(m, float(self.polarity))
        col = columns[self.feature]
        if self.kind == NUMERIC:
            raw = np.where(col <= self.threshold, 1.0, -1.0)
        else:
            raw = np.where(col == self.category, 1.0, -1.0)
        return self.polarity * raw

    def predict_one(self, x) -> int:
        if self.kind != CONSTANT and len(x) <= self.feature:
            raise ValueError(f"feature vector arity {len(x)} too small for feature {self.feature}")
        if self.kind == CONSTANT:
            return self.polarity
        if self.kind == NUMERIC:
            outcome = 1 if float(x[self.feature]) <= self.threshold else -1
        else:
            outcome = 1 if x[self.feature] == self.category else -1
        return self.polarity * outcome

    def to_dict(self) -> dict:
        out = {"feature": self.feature, "kind": self.kind, "polarity": self.polarity}
        if self.kind == NUMERIC:
            out["threshold"] = self.threshold
        elif self.kind == CATEGORICAL:
            out["category"] = self.category
        return out

    @classmethod
    def from_dict(cls, obj: dict) -> "Stump":
        return cls(
            feature=int(obj["feature"]),
            kind=obj["kind"],
            threshold=obj.get("threshold"),
            category=obj.get("category"),
            polarity=int(obj["polarity"]),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class HypothesisSpace:
    stumps: tuple[Stump, ...]

    @property
    def size(self) -> int:
        return len(self.stumps)


def enumerate_hypotheses(d: BinaryDataset) -> HypothesisSpace:
    """All canonical stumps over the observed values of a dataset.

    Per numeric feature with u distinct values: 2*(u-1) threshold stumps.
    Per categorical feature with c observed categories: 2*c equality stumps.
    Plus the two constant classifiers, listed last.
    """
    stumps: list[Stump] = []
    base = d.base
    for j, kind in enumerate(base.feature_kinds):
        col = base.columns[j]
        if kind == NUMERIC:
            distinct = np.unique(col)
            mids = (distinct[:-1] + distinct[1:]) / 2.0
            for thr in mids:
                for pol in (+1, -1):
                    stumps.append(Stump(j, NUMERIC, float(thr), None, pol))
        else:
            for cat in sorted(set(col.tolist())):
                for pol in (+1, -1):
                    stumps.append(Stump(j, CATEGORICAL, None, cat, pol))
    for pol in (+1, -1):
        stumps.append(Stump(-1, CONSTANT, None, None, pol))
    return HypothesisSpace(tuple(stumps))


def edge(s: Stump, d: BinaryDataset, weights: np.ndarray) -> float:
    """Weighted correlation of a stump with the labels: sum_i w_i y_i h(x_i)."""
    return float(np.dot(weights, d.y * s.predict(d.base.columns)))


def _validate_weights(weights: np.ndarray, m: int) -> np.ndarray:
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (m,):
        raise ValueError(f"weight vector has shape {w.shape}, expected ({m},)")
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    if abs(w.sum() - 1.0) > WEIGHT_TOLERANCE:
        raise ValueError(f"weights sum to {w.sum()}, expected 1 within {WEIGHT_TOLERANCE}")
    return w


class StumpTrainer:
    """Weighted stump search with one-time per-feature sorting.

    Scans each feature with prefix sums, O(d*m) per call, and reproduces
    exactly the argmax over :func:`enumerate_hypotheses` under the
    canonical tie order: lower feature index first, then ascending
    threshold / category, then polarity +1, constants last.
    """

    def __init__(self, d: BinaryDataset):
        self.d = d
        base = d.base
        self.y = d.y
        self._numeric: list[tuple[int, np.ndarray, np.ndarray, np.ndarray]] = []
        self._categorical: list[tuple[int, list[str], list[np.ndarray]]] = []
        for j, kind in enumerate(base.feature_kinds):
            col = base.columns[j]
            if kind == NUMERIC:
                order = np.argsort(col, kind="stable")
                xs = col[order]
                # Boundaries between distinct consecutive sorted values; the
                # midpoint at boundary i splits off xs[:i+1].
                boundaries = np.flatnonzero(xs[:-1] < xs[1:])
                mids = (xs[boundaries] + xs[boundaries + 1]) / 2.0
                self._numeric.append((j, order, boundaries, mids))
            else:
                cats = sorted(set(col.tolist()))
                masks = [np.asarray(col == c) for c in cats]
                self._categorical.append((j, cats, masks))

    def best(self, weights: np.ndarray) -> tuple[Stump, float]:
        w = _validate_weights(weights, self.d.m)
        wy = w * self.y
        total = float(wy.sum())

        best_stump: Stump | None = None
        best_edge = -np.inf

        for j, order, boundaries, mids in self._numeric:
            if len(boundaries) == 0:
                continue
            cums = np.cumsum(wy[order])
            left = cums[boundaries]
            edges_pos = 2.0 * left - total  # polarity +1
            k_pos = int(np.argmax(edges_pos))
            k_neg = int(np.argmax(-edges_pos))
            candidates = [
                (k_pos, +1, float(edges_pos[k_pos])),
                (k_neg, -1, float(-edges_pos[k_neg])),
            ]
            # Canonical enumeration order within a feature is ascending
            # threshold, then polarity +1 before -1.
            candidates.sort(key=lambda c: (c[0], 0 if c[1] == +1 else 1))
            for k, pol, e in candidates:
                if e > best_edge:
                    best_edge = e
                    best_stump = Stump(j, NUMERIC, float(mids[k]), None, pol)

        for j, cats, masks in self._categorical:
            for cat, mask in zip(cats, masks):
                e_pos = float(2.0 * wy[mask].sum() - total)
                for pol, e in ((+1, e_pos), (-1, -e_pos)):
                    if e > best_edge:
                        best_edge = e
                        best_stump = Stump(j, CATEGORICAL, None, cat, pol)

        for pol, e in ((+1, total), (-1, -total)):
            if e > best_edge:
                best_edge = e
                best_stump = Stump(-1, CONSTANT, None, None, pol)

        assert best_stump is not None
        return best_stump, float(np.clip(best_edge, -1.0, 1.0))


def train_stump(d: BinaryDataset, weights: np.ndarray) -> tuple[Stump, float]:
    """Best stump under a weighted distribution (one-shot convenience form)."""
    return StumpTrainer(d).best(weights)
