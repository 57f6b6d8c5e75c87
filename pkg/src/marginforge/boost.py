"""Unified boosting loop for AdaBoost and arc-gv over decision stumps.

Both algorithms share the same reweighting scheme; they differ only in
the per-round step size.  AdaBoost uses the half log-odds of the edge,
arc-gv subtracts the half log-odds of the running minimum margin of the
normalized partial classifier.  Negative arc-gv steps are clamped to zero
by default so the output stays a convex combination; the raw step is
preserved in the trace.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import BinaryDataset
from .stump import HypothesisSpace, Stump, StumpTrainer

GAMMA_CLAMP = 1.0 - 1e-12
EARLY_STOP_EDGE = 1e-12

ADABOOST = "adaboost"
ARCGV = "arcgv"


class TrainingFailure(RuntimeError):
    """Raised when no round contributed positive weight or a round aborts."""


@dataclass(frozen=True)
class VotingClassifier:
    """Convex combination of stumps; weights sum to 1 when normalized."""

    members: tuple[tuple[Stump, float], ...]
    normalized: bool = True

    def __post_init__(self):
        if any(a < 0 for _, a in self.members):
            raise ValueError("member weights must be nonnegative")
        if self.normalized:
            total = sum(a for _, a in self.members)
            if abs(total - 1.0) > 1e-9:
                raise ValueError(f"normalized classifier weights sum to {total}")

    def score(self, columns) -> np.ndarray:
        """f(x) for every instance, in [-1, 1] when normalized."""
        m = len(columns[0])
        out = np.zeros(m)
        for stump, alpha in self.members:
            out += alpha * stump.predict(columns)
        return out

    def weights(self) -> np.ndarray:
        return np.array([a for _, a in self.members], dtype=np.float64)

    def to_dict(self) -> dict:
        return {
            "members": [{"stump": s.to_dict(), "alpha": a} for s, a in self.members],
            "normalized": self.normalized,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "VotingClassifier":
        members = tuple(
            (Stump.from_dict(mem["stump"]), float(mem["alpha"])) for mem in obj["members"]
        )
        return cls(members=members, normalized=bool(obj.get("normalized", True)))

    def to_json(self, **extra) -> str:
        out = self.to_dict()
        out.update(extra)
        return json.dumps(out, indent=2)


@dataclass
class RoundRecord:
    t: int
    gamma: float
    alpha_raw: float
    alpha_used: float
    rho: float
    z: float
    train_error: float


@dataclass
class BoostTrace:
    rule: str
    rounds: list[RoundRecord] = field(default_factory=list)

    TRACE_COLUMNS = ("t", "gamma", "alpha_raw", "alpha_used", "rho", "Z", "train_error")

    def to_csv(self) -> str:
        lines = [",".join(self.TRACE_COLUMNS)]
        for r in self.rounds:
            lines.append(
                f"{r.t},{r.gamma!r},{r.alpha_raw!r},{r.alpha_used!r},"
                f"{r.rho!r},{r.z!r},{r.train_error!r}"
            )
        return "\n".join(lines) + "\n"


def _clamp(v: float) -> float:
    return max(-GAMMA_CLAMP, min(GAMMA_CLAMP, v))


def alpha_adaboost(gamma: float) -> float:
    """Half log-odds step: 0.5 * ln((1+gamma)/(1-gamma))."""
    g = _clamp(gamma)
    return 0.5 * math.log((1.0 + g) / (1.0 - g))


def alpha_arcgv(gamma: float, rho: float) -> float:
    """AdaBoost step minus the half log-odds of the current minimum margin."""
    return alpha_adaboost(gamma) - alpha_adaboost(rho)


def update_weights(
    dist: np.ndarray, alpha: float, agreements: np.ndarray
) -> tuple[np.ndarray, float]:
    """One multiplicative reweighting round; returns (new distribution, Z)."""
    d = np.asarray(dist, dtype=np.float64)
    a = np.asarray(agreements, dtype=np.float64)
    if not np.all(np.isin(a, (-1.0, 1.0))):
        raise ValueError("agreements must be +-1")
    if abs(d.sum() - 1.0) > 1e-9:
        raise ValueError("distribution must sum to 1")
    with np.errstate(over="ignore", invalid="ignore"):
        unnorm = d * np.exp(-alpha * a)
    z = float(unnorm.sum())
    if not (z > 0.0) or not math.isfinite(z):
        raise TrainingFailure(f"weight normalizer underflow (Z={z}) at alpha={alpha}")
    return unnorm / z, z


def run(
    d: BinaryDataset,
    space: HypothesisSpace | None,
    rounds: int,
    rule: str = ADABOOST,
    clamp_negative_steps: bool = True,
) -> tuple[VotingClassifier, BoostTrace]:
    """Run the boosting loop for the given number of rounds.

    ``space`` is accepted for parity with the enumeration API; the trainer
    performs an equivalent exhaustive weighted search directly.  AdaBoost
    stops early once the best edge drops to numerical zero; arc-gv always
    runs all rounds (its step may legitimately be zero).
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    if rule not in (ADABOOST, ARCGV):
        raise ValueError(f"unknown rule: {rule}")

    trainer = StumpTrainer(d)
    m = d.m
    y = d.y
    dist = np.full(m, 1.0 / m)

    members: list[tuple[Stump, float]] = []
    trace = BoostTrace(rule=rule)
    margin_num = np.zeros(m)  # sum_t alpha_t * y_i * h_t(x_i), unnormalized
    alpha_sum = 0.0

    for t in range(1, rounds + 1):
        stump, gamma = trainer.best(dist)
        rho = float(margin_num.min() / alpha_sum) if alpha_sum > 0 else 0.0

        if rule == ADABOOST:
            alpha_raw = alpha_adaboost(gamma)
        else:
            alpha_raw = alpha_arcgv(gamma, _clamp(rho))
        alpha_used = alpha_raw
        if clamp_negative_steps and alpha_used < 0.0:
            alpha_used = 0.0

        agreements = y * stump.predict(d.base.columns)
        dist, z = update_weights(dist, alpha_used, agreements)

        members.append((stump, alpha_used))
        margin_num += alpha_used * agreements
        alpha_sum += alpha_used
        # yf(x) <= 0 counts as an error, so exp(-y F) dominates the indicator
        # and the product-of-Z bound holds round by round.
        train_error = float(np.mean(margin_num <= 0.0))
        trace.rounds.append(
            RoundRecord(
                t=t,
                gamma=gamma,
                alpha_raw=alpha_raw,
                alpha_used=alpha_used,
                rho=rho,
                z=z,
                train_error=train_error,
            )
        )

        if rule == ADABOOST and gamma <= EARLY_STOP_EDGE:
            break

    if alpha_sum <= 0.0:
        raise TrainingFailure("every round contributed zero weight; cannot normalize")

    final = tuple((s, a / alpha_sum) for s, a in members)
    return VotingClassifier(members=final, normalized=True), trace
