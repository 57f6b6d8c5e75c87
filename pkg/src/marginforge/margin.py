"""Per-instance margins of a voting classifier and derived statistics.

The margin of (x, y) under f = sum_i a_i h_i is y*f(x): the total weight
of members voting correctly minus the weight voting incorrectly.  All
bound evaluators consume the sorted profile produced here.  Both the
strict (<) and non-strict (<=) empirical CDFs are provided because the
bounds mix the two variants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .boost import VotingClassifier
from .dataset import BinaryDataset


@dataclass(frozen=True)
class MarginProfile:
    """Sorted ascending margins of one classifier on one sample."""

    margins: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.margins, dtype=np.float64)
        if arr.ndim != 1 or len(arr) < 1:
            raise ValueError("margins must be a non-empty 1-D array")
        if np.any(np.diff(arr) < 0):
            raise ValueError("margins must be sorted ascending")
        if arr.min() < -1.0 - 1e-12 or arr.max() > 1.0 + 1e-12:
            raise ValueError("margins must lie in [-1, 1]")
        # Convex combinations of +/-1 votes can drift a few ulps outside
        # [-1, 1]; snap back so order statistics compare exactly.
        object.__setattr__(self, "margins", np.clip(arr, -1.0, 1.0))

    @property
    def m(self) -> int:
        return len(self.margins)

    @classmethod
    def from_values(cls, values) -> "MarginProfile":
        return cls(np.sort(np.asarray(values, dtype=np.float64)))


def profile(f: VotingClassifier, d: BinaryDataset) -> MarginProfile:
    """Exact sorted margins y_i * f(x_i) over the sample."""
    if not f.normalized:
        raise ValueError("classifier must be normalized")
    scores = f.score(d.base.columns)
    return MarginProfile.from_values(d.y * scores)


def kth_margin(p: MarginProfile, k: int) -> float:
    """The kth smallest margin; k=1 is the minimum margin."""
    if not 1 <= k <= p.m:
        raise ValueError(f"k={k} out of range [1, {p.m}]")
    return float(p.margins[k - 1])


def cdf(p: MarginProfile, theta: float, strict: bool = False) -> float:
    """Empirical margin CDF: fraction of margins < theta (strict) or <= theta."""
    side = "left" if strict else "right"
    return float(np.searchsorted(p.margins, theta, side=side)) / p.m


def moments(p: MarginProfile) -> tuple[float, float]:
    """Sample mean and population variance of the margins."""
    mean = float(np.mean(p.margins))
    var = float(np.mean((p.margins - mean) ** 2))
    return mean, var


def i_hat(p: MarginProfile, theta: float) -> float:
    """Spread statistic: Pr_S[yf < theta] * Pr_S[yf >= 2*theta/3]."""
    if not 0.0 < theta <= 1.0:
        raise ValueError("theta must be in (0, 1]")
    below = cdf(p, theta, strict=True)
    at_least = 1.0 - cdf(p, 2.0 * theta / 3.0, strict=True)
    return below * at_least


def emargin_theta(p: MarginProfile, q: float, h_size: int) -> float | None:
    """The largest margin level whose empirical CDF stays at or below q.

    Admissible levels live in (sqrt(8/h_size), 1].  The supremum is the
    (floor(q*m)+1)-th order statistic, the point where the CDF first
    exceeds q; ``None`` when no admissible level exists.  q must lie on
    the grid {0, 1/m, ..., 1}.
    """
    if h_size < 9:
        raise ValueError("h_size must be >= 9 for a non-degenerate level interval")
    m = p.m
    scaled = q * m
    if not 0.0 <= q <= 1.0 or abs(scaled - round(scaled)) > 1e-9:
        raise ValueError(f"q={q} not on the grid {{0, 1/m, ..., 1}} for m={m}")
    lower = math.sqrt(8.0 / h_size)

    k = int(round(scaled)) + 1
    if k > m:  # q == 1: the CDF constraint is vacuous
        return 1.0
    theta = float(p.margins[k - 1])
    if theta > lower and theta <= 1.0:
        return theta
    if theta > 1.0:
        return 1.0
    return None


def candidate_thetas(p: MarginProfile, grid_points: int = 1000) -> np.ndarray:
    """Observed margins in (0, 1] plus a uniform grid: the search set for
    the theta-infima of the bound evaluators."""
    grid = np.linspace(1.0 / grid_points, 1.0, grid_points)
    observed = np.unique(p.margins)
    observed = observed[(observed > 0.0) & (observed <= 1.0)]
    return np.unique(np.concatenate([observed, grid]))


def cdf_export_csv(p: MarginProfile, grid_points: int = 1000) -> str:
    """Two-column (theta, cdf) table over sorted unique margins plus a
    uniform grid on [-1, 1]; plot-ready."""
    grid = np.linspace(-1.0, 1.0, grid_points)
    thetas = np.unique(np.concatenate([np.unique(p.margins), grid]))
    lines = ["theta,cdf"]
    for t in thetas:
        lines.append(f"{float(t)!r},{cdf(p, float(t), strict=False)!r}")
    return "\n".join(lines) + "\n"
