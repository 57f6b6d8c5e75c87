"""Paired comparison harness, significance accounting, and bound sweeps."""

import math

import numpy as np
import pytest

from marginforge._tcrit import critical_value
from marginforge.bench import (
    Comparison,
    ExperimentConfig,
    bound_sweep,
    paired_t_test,
    run_experiment,
    win_tie_loss,
)
from marginforge.boost import run
from marginforge.stump import enumerate_hypotheses

from conftest import make_numeric_dataset


# --- t critical values ---------------------------------------------------------


def test_critical_values_table():
    # Two-sided 95% quantiles of Student's t.
    assert critical_value(1) == pytest.approx(12.7062, abs=1e-3)
    assert critical_value(9) == pytest.approx(2.2622, abs=1e-3)
    assert critical_value(99) == pytest.approx(1.9842, abs=1e-3)
    # Beyond the table: normal limit.
    assert critical_value(10**6) == pytest.approx(1.9600, abs=1e-3)


def test_critical_values_decreasing():
    vals = [critical_value(df) for df in (1, 2, 5, 10, 50, 100, 200)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


# --- paired t-test ---------------------------------------------------------------


def test_paired_t_known_value():
    a = np.array([0.10, 0.12, 0.11, 0.13, 0.09])
    b = np.array([0.20, 0.19, 0.22, 0.18, 0.21])
    diff = a - b
    t_expect = diff.mean() / (diff.std(ddof=1) / math.sqrt(5))
    comp = paired_t_test(a, b, "d")
    assert comp.t_statistic == pytest.approx(t_expect, abs=1e-12)
    assert comp.critical_value == pytest.approx(critical_value(4))
    assert comp.winner == "adaboost"  # a has lower error, |t| large


def test_paired_t_tie_when_insignificant():
    a = np.array([0.10, 0.20, 0.15, 0.18])
    b = np.array([0.12, 0.17, 0.16, 0.17])
    comp = paired_t_test(a, b)
    assert comp.winner == "tie"


def test_paired_t_zero_variance_cases():
    same = np.array([0.1, 0.1, 0.1])
    assert paired_t_test(same, same).winner == "tie"
    comp = paired_t_test(same, same + 0.05)
    assert comp.winner == "adaboost"
    assert math.isinf(comp.t_statistic)
    comp = paired_t_test(same + 0.05, same)
    assert comp.winner == "arcgv"


def test_paired_t_validation():
    with pytest.raises(ValueError):
        paired_t_test([0.1], [0.2])
    with pytest.raises(ValueError):
        paired_t_test([0.1, 0.2], [0.2])


def test_paired_t_false_positive_rate_calibrated():
    # Under the null (same distribution) the 95%-level test should reject
    # about 5% of the time.
    rng = np.random.default_rng(0)
    reps, n = 2000, 10
    rejections = 0
    for _ in range(reps):
        a = rng.normal(0.2, 0.05, n)
        b = rng.normal(0.2, 0.05, n)
        if paired_t_test(a, b).winner != "tie":
            rejections += 1
    rate = rejections / reps
    assert 0.03 <= rate <= 0.07


def test_win_tie_loss_counting():
    comps = [
        Comparison("a", "adaboost", 3.0, 2.0),
        Comparison("b", "tie", 0.5, 2.0),
        Comparison("c", "arcgv", -3.0, 2.0),
        Comparison("d", "adaboost", 2.5, 2.0),
    ]
    assert win_tie_loss(comps) == (2, 1, 1)


# --- experiment runner ------------------------------------------------------------


@pytest.fixture(scope="module")
def small_dataset():
    rng = np.random.default_rng(2)
    m = 60
    x = rng.uniform(-1, 1, m)
    labels = ["p" if xi + rng.normal(0, 0.3) > 0 else "n" for xi in x]
    if len(set(labels)) < 2:  # pragma: no cover
        labels[0] = "p" if labels[0] == "n" else "n"
    return make_numeric_dataset([x], labels, name="small")


def test_run_experiment_paired_folds(small_dataset):
    config = ExperimentConfig(rounds=10, trials=2, folds=5, seed=0)
    ada, arc = run_experiment(small_dataset, config)
    assert len(ada.folds) == len(arc.folds) == 10
    for fa, fb in zip(ada.folds, arc.folds):
        assert (fa.trial, fa.fold) == (fb.trial, fb.fold)
        assert fa.h_size == fb.h_size  # same training split
        assert 0.0 <= fa.test_error <= 1.0
        assert -1.0 <= fa.min_train_margin <= fa.avg_train_margin <= 1.0
    assert 0.0 <= ada.mean <= 1.0
    assert ada.std >= 0.0


def test_run_experiment_deterministic(small_dataset):
    config = ExperimentConfig(rounds=5, trials=1, folds=5, seed=7)
    a1, _ = run_experiment(small_dataset, config)
    a2, _ = run_experiment(small_dataset, config)
    assert a1.errors.tolist() == a2.errors.tolist()


def test_run_result_summary_consistency(small_dataset):
    config = ExperimentConfig(rounds=5, trials=1, folds=5, seed=0)
    ada, _ = run_experiment(small_dataset, config)
    e = ada.errors
    assert ada.mean == pytest.approx(float(e.mean()), abs=1e-12)
    assert ada.std == pytest.approx(float(e.std(ddof=1)), abs=1e-12)


# --- bound sweep -------------------------------------------------------------------


def test_bound_sweep_contents(toy_noisy):
    clf, _ = run(toy_noisy, None, 30, "adaboost")
    h_size = enumerate_hypotheses(toy_noisy).size
    reports = bound_sweep(clf, toy_noisy, h_size, 0.05)
    names = [r.bound_name for r in reports]
    for required in ("breiman", "emargin", "new_upper", "lower", "distribution",
                     "schapire_index"):
        assert required in names
    kth = [r for r in reports if r.bound_name == "kth_margin"]
    assert kth, "at least one positive kth margin expected on a boosted fit"
    # ks are the positive-margin indices, in order.
    ks = [r.arg for r in kth]
    assert ks == sorted(ks)


def test_bound_sweep_max_kth_truncates(toy_noisy):
    clf, _ = run(toy_noisy, None, 30, "adaboost")
    h_size = enumerate_hypotheses(toy_noisy).size
    reports = bound_sweep(clf, toy_noisy, h_size, 0.05, max_kth=3)
    kth = [r for r in reports if r.bound_name == "kth_margin"]
    assert len(kth) <= 3
