"""Concentration layer: sample-variance deviation radii, variance
concentration, committee sampling, and Monte Carlo coverage certification.

The canonical pairwise variance statistic is
    v_hat = sum_{i != j} (Z_i - Z_j)^2 / (2 m (m-1)),
which equals the classical unbiased sample variance and has the true
variance as its expectation.  A printed half-form (sum over i < j with the
same normalizer) circulates as well and is exposed behind a flag for
study; the full form is what the deviation radius relies on.

Coverage tests draw trials in counter-seeded blocks so results are
independent of any execution schedule.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .boost import VotingClassifier
from .dataset import BinaryDataset

MC_BLOCK = 4096


@dataclass(frozen=True)
class SampleStats:
    values: np.ndarray
    mean: float
    v_hat: float

    @property
    def m(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class CoverageResult:
    trials: int
    violations: int
    target_delta: float

    @property
    def empirical_rate(self) -> float:
        return self.violations / self.trials

    @property
    def mc_stderr(self) -> float:
        r = self.empirical_rate
        return math.sqrt(r * (1.0 - r) / self.trials)

    @property
    def passed(self) -> bool:
        return self.empirical_rate <= self.target_delta + 3.0 * self.mc_stderr

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "violations": self.violations,
            "rate": self.empirical_rate,
            "delta": self.target_delta,
            "mc_stderr": self.mc_stderr,
            "pass": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


# ---------------------------------------------------------------------------
# Distributions for the Monte Carlo harness


@dataclass(frozen=True)
class Distribution:
    """A [0, 1]-valued distribution with known mean and variance."""

    tag: str
    mean: float
    variance: float

    def sample(self, rng: np.random.Generator, shape) -> np.ndarray:
        if self.tag.startswith("bernoulli"):
            p = self.mean
            return (rng.random(shape) < p).astype(np.float64)
        if self.tag == "uniform":
            return rng.random(shape)
        if self.tag == "twopoint":
            lo, hi = 0.1, 0.9
            return np.where(rng.random(shape) < 0.5, lo, hi)
        raise ValueError(f"unknown distribution tag: {self.tag}")


def make_distribution(tag: str) -> Distribution:
    """Parse a tag: 'bernoulli:p', 'uniform', or 'twopoint'."""
    if tag.startswith("bernoulli"):
        try:
            p = float(tag.split(":", 1)[1])
        except (IndexError, ValueError):
            raise ValueError(f"bernoulli tag needs a probability, got {tag!r}") from None
        if not 0.0 <= p <= 1.0:
            raise ValueError("bernoulli p must be in [0, 1]")
        return Distribution(f"bernoulli:{p}", mean=p, variance=p * (1.0 - p))
    if tag == "uniform":
        return Distribution("uniform", mean=0.5, variance=1.0 / 12.0)
    if tag == "twopoint":
        # Symmetric two-point mass at 0.1 and 0.9.
        return Distribution("twopoint", mean=0.5, variance=0.16)
    raise ValueError(f"unknown distribution tag: {tag!r}")


# ---------------------------------------------------------------------------
# Variance statistic and deviation radius


def v_hat(values, printed_half_form: bool = False) -> float:
    """Unbiased pairwise variance statistic, computed via the O(m)
    sum-of-squared-deviations identity."""
    z = np.asarray(values, dtype=np.float64)
    if z.ndim != 1 or len(z) < 2:
        raise ValueError("need at least two values")
    m = len(z)
    full = float(np.sum((z - z.mean()) ** 2) / (m - 1))
    return full / 2.0 if printed_half_form else full


def _v_hat_rows(samples: np.ndarray) -> np.ndarray:
    m = samples.shape[1]
    return samples.var(axis=1, ddof=1) if m > 1 else np.zeros(len(samples))


def sample_stats(values) -> SampleStats:
    z = np.asarray(values, dtype=np.float64)
    return SampleStats(values=z, mean=float(z.mean()), v_hat=v_hat(z))


def deviation_radius(v: float, m: int, delta: float) -> float:
    """sqrt(2 v ln(2/delta) / m) + 7 ln(2/delta) / (3m)."""
    log_term = math.log(2.0 / delta)
    return math.sqrt(2.0 * v * log_term / m) + 7.0 * log_term / (3.0 * m)


def empirical_bernstein(values, delta: float) -> tuple[float, float]:
    """Symmetric deviation radii (upper, lower) for the sample mean."""
    z = np.asarray(values, dtype=np.float64)
    if len(z) < 4:
        raise ValueError("m must be >= 4")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must be in (0, 1)")
    radius = deviation_radius(v_hat(z), len(z), delta)
    return radius, radius


# ---------------------------------------------------------------------------
# Monte Carlo coverage


def coverage_test(
    dist: Distribution | str,
    m: int,
    delta: float,
    trials: int,
    seed: int,
) -> tuple[CoverageResult, CoverageResult]:
    """Empirically certify the mean-deviation radii against the true mean.

    Returns (upper, lower) coverage: the upper result counts trials where
    the true mean exceeded sample mean + radius, the lower result trials
    where it fell below sample mean - radius.
    """
    if isinstance(dist, str):
        dist = make_distribution(dist)
    if m < 4:
        raise ValueError("m must be >= 4")
    if trials < 1000:
        raise ValueError("trials must be >= 1000")

    upper_viol = lower_viol = 0
    produced = 0
    block = 0
    while produced < trials:
        n = min(MC_BLOCK, trials - produced)
        rng = np.random.default_rng([seed, block])
        samples = dist.sample(rng, (n, m))
        means = samples.mean(axis=1)
        radii = np.sqrt(2.0 * _v_hat_rows(samples) * math.log(2.0 / delta) / m) + (
            7.0 * math.log(2.0 / delta) / (3.0 * m)
        )
        upper_viol += int(np.sum(dist.mean - means > radii))
        lower_viol += int(np.sum(dist.mean - means < -radii))
        produced += n
        block += 1

    return (
        CoverageResult(trials, upper_viol, delta),
        CoverageResult(trials, lower_viol, delta),
    )


def variance_concentration_test(
    dist: Distribution | str,
    m: int,
    delta: float,
    trials: int,
    seed: int,
) -> tuple[CoverageResult, CoverageResult]:
    """Certify both one-sided concentration radii of sqrt(v_hat) around the
    true standard deviation.

    Lower result: sqrt(true var) < sqrt(v_hat) - sqrt(ln(1/delta)/(16m)).
    Upper result: sqrt(true var) > sqrt(v_hat) + sqrt(2 ln(1/delta)/m).
    """
    if isinstance(dist, str):
        dist = make_distribution(dist)
    if m < 4:
        raise ValueError("m must be >= 4")
    if trials < 1000:
        raise ValueError("trials must be >= 1000")

    true_sd = math.sqrt(dist.variance)
    low_radius = math.sqrt(math.log(1.0 / delta) / (16.0 * m))
    high_radius = math.sqrt(2.0 * math.log(1.0 / delta) / m)

    lower_viol = upper_viol = 0
    produced = 0
    block = 0
    while produced < trials:
        n = min(MC_BLOCK, trials - produced)
        rng = np.random.default_rng([seed, block])
        samples = dist.sample(rng, (n, m))
        sd_hat = np.sqrt(_v_hat_rows(samples))
        lower_viol += int(np.sum(true_sd < sd_hat - low_radius))
        upper_viol += int(np.sum(true_sd > sd_hat + high_radius))
        produced += n
        block += 1

    return (
        CoverageResult(trials, lower_viol, delta),
        CoverageResult(trials, upper_viol, delta),
    )


# ---------------------------------------------------------------------------
# Committee sampling


def sample_committee(f: VotingClassifier, n: int, seed: int) -> VotingClassifier:
    """Unweighted n-member committee drawn i.i.d. from f's member weights."""
    if not f.normalized:
        raise ValueError("classifier must be normalized")
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    weights = f.weights()
    idx = rng.choice(len(weights), size=n, p=weights / weights.sum())
    counts: dict[int, int] = {}
    for i in idx.tolist():
        counts[i] = counts.get(i, 0) + 1
    members = tuple((f.members[i][0], c / n) for i, c in sorted(counts.items()))
    return VotingClassifier(members=members, normalized=True)


def committee_tail_bound(n: int, t: float, avg_margin: float) -> float:
    """exp(-n t^2 / (2 - 2 avg^2 + 4t/3))."""
    return math.exp(-n * t * t / (2.0 - 2.0 * avg_margin * avg_margin + 4.0 * t / 3.0))


def committee_tail_test(
    f: VotingClassifier,
    d: BinaryDataset,
    n: int,
    t: float,
    draws: int,
    seed: int,
) -> CoverageResult:
    """Empirical frequency of {y g(x) - y f(x) >= t} over random (instance,
    committee) pairs, certified against the closed-form tail bound."""
    if t <= 0.0:
        raise ValueError("t must be > 0")
    if not f.normalized:
        raise ValueError("classifier must be normalized")

    columns = d.base.columns
    y = d.y
    agreements = np.stack([y * s.predict(columns) for s, _ in f.members])  # (k, m)
    yf = f.score(columns) * y
    avg_margin = float(np.mean(yf))
    weights = f.weights()
    weights = weights / weights.sum()
    bound = committee_tail_bound(n, t, avg_margin)

    violations = 0
    produced = 0
    block = 0
    m = d.m
    while produced < draws:
        size = min(MC_BLOCK, draws - produced)
        rng = np.random.default_rng([seed, block])
        member_idx = rng.choice(len(weights), size=(size, n), p=weights)
        inst_idx = rng.integers(0, m, size=size)
        yg = agreements[member_idx, inst_idx[:, None]].mean(axis=1)
        violations += int(np.sum(yg - yf[inst_idx] >= t))
        produced += size
        block += 1

    return CoverageResult(draws, violations, bound)
