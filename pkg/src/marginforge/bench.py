"""Cross-validated AdaBoost vs arc-gv comparisons with significance testing.

Both algorithms consume byte-identical fold assignments (paired design);
the hypothesis space size is enumerated on the training split of each
fold, since that is the space the weak learner actually searches.  The
win/tie/loss tally is always from AdaBoost's perspective.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._tcrit import critical_value
from .boost import ADABOOST, ARCGV, VotingClassifier, run
from .bounds import (
    BoundInputs,
    BoundReport,
    bound_breiman,
    bound_distribution,
    bound_emargin,
    bound_kth,
    bound_lower,
    bound_new,
    check_corollary2,
    index_schapire,
)
from .dataset import BinaryDataset, Dataset, binarize, cv_splits
from .margin import kth_margin, moments, profile
from .stump import enumerate_hypotheses


class Corollary2Violation(RuntimeError):
    """The executable tightness theorem failed; the implementation is wrong."""


@dataclass(frozen=True)
class ExperimentConfig:
    rounds: int = 100
    trials: int = 10
    folds: int = 10
    seed: int = 0
    delta: float = 0.05


@dataclass
class FoldRecord:
    trial: int
    fold: int
    test_error: float
    min_train_margin: float
    avg_train_margin: float
    h_size: int


@dataclass
class RunResult:
    dataset: str
    algorithm: str
    folds: list[FoldRecord] = field(default_factory=list)

    @property
    def errors(self) -> np.ndarray:
        return np.array([f.test_error for f in self.folds])

    @property
    def mean(self) -> float:
        return float(self.errors.mean())

    @property
    def std(self) -> float:
        e = self.errors
        return float(e.std(ddof=1)) if len(e) > 1 else 0.0


@dataclass(frozen=True)
class Comparison:
    dataset: str
    winner: str  # "adaboost" | "arcgv" | "tie"
    t_statistic: float
    critical_value: float


def run_experiment(
    d: Dataset, config: ExperimentConfig
) -> tuple[RunResult, RunResult]:
    """Paired 10x10-style CV of both boosting rules on one dataset."""
    binary = binarize(d)
    plan = cv_splits(binary, config.trials, config.folds, config.seed)
    ada = RunResult(d.name, ADABOOST)
    arc = RunResult(d.name, ARCGV)

    for trial in range(config.trials):
        for fold in range(config.folds):
            train_idx, test_idx = plan.train_test_indices(trial, fold)
            train = binary.subset(train_idx)
            test = binary.subset(test_idx)
            if len(set(np.sign(train.y).tolist())) < 2:
                continue  # degenerate fold: training split has one class
            h_size = enumerate_hypotheses(train).size
            for rule, result in ((ADABOOST, ada), (ARCGV, arc)):
                clf, _ = run(train, None, config.rounds, rule)
                train_prof = profile(clf, train)
                test_margins = test.y * clf.score(test.base.columns)
                result.folds.append(
                    FoldRecord(
                        trial=trial,
                        fold=fold,
                        test_error=float(np.mean(test_margins <= 0.0)),
                        min_train_margin=kth_margin(train_prof, 1),
                        avg_train_margin=moments(train_prof)[0],
                        h_size=h_size,
                    )
                )
    return ada, arc


def paired_t_test(a, b, dataset: str = "") -> Comparison:
    """Two-sided paired t-test at the 95% level; winner is the smaller-error
    side when significant."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("paired samples must be equal-length vectors")
    n = len(a)
    if n < 2:
        raise ValueError("need at least two paired observations")
    diff = a - b
    mean = float(diff.mean())
    sd = float(diff.std(ddof=1))
    crit = critical_value(n - 1)
    if sd == 0.0:
        t = 0.0 if mean == 0.0 else math.inf * np.sign(mean)
        significant = mean != 0.0
    else:
        t = mean / (sd / math.sqrt(n))
        significant = abs(t) > crit
    if not significant:
        winner = "tie"
    else:
        winner = ADABOOST if mean < 0.0 else ARCGV
    return Comparison(dataset=dataset, winner=winner, t_statistic=float(t), critical_value=crit)


def win_tie_loss(comparisons) -> tuple[int, int, int]:
    """(wins, ties, losses) from AdaBoost's perspective."""
    w = sum(1 for c in comparisons if c.winner == ADABOOST)
    t = sum(1 for c in comparisons if c.winner == "tie")
    l = sum(1 for c in comparisons if c.winner == ARCGV)
    return w, t, l


def bound_sweep(
    f: VotingClassifier,
    d: BinaryDataset,
    h_size: int,
    delta: float,
    max_kth: int | None = None,
) -> list[BoundReport]:
    """Evaluate every bound on one trained classifier and one sample.

    A corollary-2 violation under satisfied preconditions is raised as a
    hard error: it would falsify the implementation, not the theory.
    """
    prof = profile(f, d)
    inputs = BoundInputs(m=prof.m, h_size=h_size, delta=delta, profile=prof)

    reports = [bound_breiman(inputs)]
    ks = [k for k in range(1, prof.m + 1) if kth_margin(prof, k) > 0.0]
    if max_kth is not None and len(ks) > max_kth:
        ks = ks[:max_kth]
    for k in ks:
        reports.append(bound_kth(inputs, k))
    reports.append(bound_emargin(inputs))
    reports.append(bound_new(inputs))
    reports.append(bound_lower(inputs))
    reports.append(bound_distribution(inputs))
    theta1 = kth_margin(prof, 1)
    reports.append(index_schapire(inputs, theta1 if theta1 > 0 else 0.5))

    verdict = check_corollary2(inputs)
    if verdict.preconditions_ok and not verdict.inequality_holds:
        raise Corollary2Violation(
            f"tightness inequality violated: new={verdict.new_value} "
            f"breiman={verdict.breiman_value}"
        )
    return reports


def reports_to_csv(dataset: str, fold: str, reports) -> list[str]:
    """Flat CSV rows (dataset, fold, bound, value, arg) for tabulation."""
    rows = []
    for r in reports:
        rows.append(f"{dataset},{fold},{r.bound_name},{r.value!r},{r.arg}")
    return rows
