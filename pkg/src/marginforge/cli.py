"""Command-line surface: train, bounds, margins, validate, benchmark, compare.

All randomness flows from a single --seed (default 0, never wall-clock).
Structured outputs are JSON, tabular outputs CSV; every output file embeds
the resolved configuration.  Exit codes: 0 success, 2 invalid config,
3 data error, 4 training failure, 5 incompatible artifacts, 6 coverage
failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .bench import (
    Corollary2Violation,
    ExperimentConfig,
    bound_sweep,
    paired_t_test,
    reports_to_csv,
    run_experiment,
    win_tie_loss,
)
from .bernstein import (
    committee_tail_test,
    coverage_test,
    make_distribution,
    variance_concentration_test,
)
from .boost import TrainingFailure, VotingClassifier, run
from .dataset import DataError, binarize, load_csv
from .margin import cdf_export_csv, kth_margin, moments, profile
from .stump import enumerate_hypotheses

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_TRAINING = 4
EXIT_INCOMPATIBLE = 5
EXIT_COVERAGE = 6

MIN_VALIDATE_TRIALS = 1000


def _echo_config(args: argparse.Namespace) -> dict:
    return {k: v for k, v in vars(args).items() if k != "func" and not k.startswith("_")}


def _emit(payload: str, out: str | None) -> None:
    if out:
        Path(out).write_text(payload)
    else:
        sys.stdout.write(payload)


def _load_binary(path: str):
    dataset = load_csv(path)
    return binarize(dataset)


def cmd_train(args) -> int:
    try:
        binary = _load_binary(args.dataset)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    try:
        clf, trace = run(binary, None, args.rounds, args.rule)
    except TrainingFailure as exc:
        print(f"training failure: {exc}", file=sys.stderr)
        return EXIT_TRAINING

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "classifier.json").write_text(
        clf.to_json(config=_echo_config(args))
    )
    (out_dir / "trace.csv").write_text(trace.to_csv())
    print(f"wrote {out_dir / 'classifier.json'} and {out_dir / 'trace.csv'}", file=sys.stderr)
    return EXIT_OK


def cmd_bounds(args) -> int:
    try:
        binary = _load_binary(args.dataset)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    try:
        clf = VotingClassifier.from_dict(json.loads(Path(args.classifier).read_text()))
    except (OSError, ValueError, KeyError) as exc:
        print(f"cannot load classifier: {exc}", file=sys.stderr)
        return EXIT_DATA
    try:
        clf.score(binary.base.columns)
    except (IndexError, ValueError) as exc:
        print(f"incompatible classifier/dataset pair: {exc}", file=sys.stderr)
        return EXIT_INCOMPATIBLE

    h_size = args.h_size or enumerate_hypotheses(binary).size
    try:
        reports = bound_sweep(clf, binary, h_size, args.delta)
    except Corollary2Violation as exc:
        print(f"tightness violation: {exc}", file=sys.stderr)
        return EXIT_COVERAGE
    payload = json.dumps(
        {"config": _echo_config(args), "h_size": h_size,
         "bounds": [r.to_dict() for r in reports]},
        indent=2,
    )
    _emit(payload + "\n", args.out)
    return EXIT_OK


def cmd_margins(args) -> int:
    try:
        binary = _load_binary(args.dataset)
        clf = VotingClassifier.from_dict(json.loads(Path(args.classifier).read_text()))
        prof = profile(clf, binary)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (OSError, ValueError, KeyError, IndexError) as exc:
        print(f"incompatible artifacts: {exc}", file=sys.stderr)
        return EXIT_INCOMPATIBLE
    _emit(cdf_export_csv(prof), args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    if args.trials < MIN_VALIDATE_TRIALS:
        print(f"trials below the {MIN_VALIDATE_TRIALS} floor", file=sys.stderr)
        return EXIT_CONFIG
    results = {}
    if args.suite == "bernstein":
        for tag in ("bernoulli:0.1", "bernoulli:0.5", "uniform"):
            for m in (4, 30, 100):
                for delta in (0.05, 0.2):
                    upper, lower = coverage_test(tag, m, delta, args.trials, args.seed)
                    results[f"{tag},m={m},delta={delta},upper"] = upper.to_dict()
                    results[f"{tag},m={m},delta={delta},lower"] = lower.to_dict()
    elif args.suite == "variance":
        for tag in ("bernoulli:0.1", "bernoulli:0.5", "uniform"):
            for m in (4, 30, 100):
                for delta in (0.05, 0.2):
                    low, high = variance_concentration_test(tag, m, delta, args.trials, args.seed)
                    results[f"{tag},m={m},delta={delta},low"] = low.to_dict()
                    results[f"{tag},m={m},delta={delta},high"] = high.to_dict()
    else:  # committee
        binary, clf = _toy_committee(args.seed)
        for n in (16, 64):
            for t in (0.1, 0.25, 0.5):
                res = committee_tail_test(clf, binary, n, t, args.trials, args.seed)
                results[f"n={n},t={t}"] = res.to_dict()

    payload = json.dumps({"config": _echo_config(args), "results": results}, indent=2)
    print(payload)
    all_pass = all(r["pass"] for r in results.values())
    return EXIT_OK if all_pass else EXIT_COVERAGE


def _toy_committee(seed: int):
    """A small boosted committee on a noisy 1-D sample for validation runs."""
    from .dataset import BinaryDataset, Dataset

    rng = np.random.default_rng(seed)
    m = 200
    x = rng.uniform(-1.0, 1.0, m)
    y = np.where(x + rng.normal(0.0, 0.4, m) > 0, "pos", "neg")
    dataset = Dataset(
        name="toy",
        feature_names=("x",),
        feature_kinds=("numeric",),
        columns=(x,),
        labels=tuple(y.tolist()),
    )
    binary = binarize(dataset)
    clf, _ = run(binary, None, 50, "adaboost")
    return binary, clf


def cmd_benchmark(args) -> int:
    try:
        config = json.loads(Path(args.config).read_text())
    except (OSError, ValueError) as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    datasets = config.get("datasets", [])
    if not datasets:
        print("config lists no datasets", file=sys.stderr)
        return EXIT_CONFIG

    exp = ExperimentConfig(
        rounds=int(config.get("T", 100)),
        trials=int(config.get("trials", 10)),
        folds=int(config.get("folds", 10)),
        seed=int(config.get("seed", 0)),
        delta=float(config.get("delta", 0.05)),
    )
    out_dir = Path(config.get("output_dir", "benchmark_out"))
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "margins").mkdir(exist_ok=True)

    results_rows = ["dataset,algorithm,mean,std,win"]
    bounds_rows = ["dataset,fold,bound,value,arg"]
    comparisons = []
    failures = {}
    for path in datasets:
        try:
            dataset = load_csv(path)
            ada, arc = run_experiment(dataset, exp)
        except (DataError, TrainingFailure) as exc:
            failures[str(path)] = str(exc)
            print(f"{path}: {exc}", file=sys.stderr)
            continue
        comp = paired_t_test(ada.errors, arc.errors, dataset.name)
        comparisons.append(comp)
        for result in (ada, arc):
            win = "*" if comp.winner == result.algorithm else ""
            results_rows.append(
                f"{result.dataset},{result.algorithm},{result.mean!r},{result.std!r},{win}"
            )
        # Bound sweep and margin CDF on the first fold's training split.
        binary = binarize(dataset)
        from .dataset import cv_splits

        plan = cv_splits(binary, 1, exp.folds, exp.seed)
        train_idx, _ = plan.train_test_indices(0, 0)
        train = binary.subset(train_idx)
        clf, _ = run(train, None, exp.rounds, "adaboost")
        h_size = enumerate_hypotheses(train).size
        try:
            reports = bound_sweep(clf, train, h_size, exp.delta)
        except Corollary2Violation as exc:
            failures[str(path)] = str(exc)
            continue
        bounds_rows.extend(reports_to_csv(dataset.name, "t0f0", reports))
        (out_dir / "margins" / f"{dataset.name}.csv").write_text(
            cdf_export_csv(profile(clf, train))
        )

    w, t, l = win_tie_loss(comparisons)
    (out_dir / "results.csv").write_text("\n".join(results_rows) + "\n")
    (out_dir / "bounds.csv").write_text("\n".join(bounds_rows) + "\n")
    (out_dir / "summary.json").write_text(
        json.dumps(
            {
                "config": config,
                "win_tie_loss": {"adaboost_wins": w, "ties": t, "arcgv_wins": l},
                "comparisons": [
                    {"dataset": c.dataset, "winner": c.winner, "t": c.t_statistic}
                    for c in comparisons
                ],
                "failures": failures,
            },
            indent=2,
        )
    )
    print(f"summary written to {out_dir / 'summary.json'}", file=sys.stderr)
    return EXIT_OK if not failures else EXIT_DATA


def cmd_compare(args) -> int:
    try:
        binary = _load_binary(args.dataset)
        clf_a = VotingClassifier.from_dict(json.loads(Path(args.classifier_a).read_text()))
        clf_b = VotingClassifier.from_dict(json.loads(Path(args.classifier_b).read_text()))
        prof_a = profile(clf_a, binary)
        prof_b = profile(clf_b, binary)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (OSError, ValueError, KeyError, IndexError) as exc:
        print(f"incompatible artifacts: {exc}", file=sys.stderr)
        return EXIT_INCOMPATIBLE

    payload = json.dumps(
        {
            "config": _echo_config(args),
            "a": {"min_margin": kth_margin(prof_a, 1), "moments": moments(prof_a)},
            "b": {"min_margin": kth_margin(prof_b, 1), "moments": moments(prof_b)},
            "min_margin_diff": kth_margin(prof_a, 1) - kth_margin(prof_b, 1),
            "avg_margin_diff": moments(prof_a)[0] - moments(prof_b)[0],
        },
        indent=2,
    )
    _emit(payload + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="marginforge")
    parser.add_argument("--jobs", type=int, default=int(os.environ.get("MARGINFORGE_JOBS", "1")))
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="boost a stump committee on a CSV dataset")
    p.add_argument("dataset")
    p.add_argument("--rule", choices=("adaboost", "arcgv"), default="adaboost")
    p.add_argument("--rounds", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="train_out")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("bounds", help="evaluate every generalization bound")
    p.add_argument("classifier")
    p.add_argument("dataset")
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--h-size", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("margins", help="export the margin CDF as CSV")
    p.add_argument("classifier")
    p.add_argument("dataset")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_margins)

    p = sub.add_parser("validate", help="Monte Carlo certification suites")
    p.add_argument("--suite", choices=("bernstein", "variance", "committee"), required=True)
    p.add_argument("--trials", type=int, default=20000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("benchmark", help="full cross-validated comparison from a JSON config")
    p.add_argument("config")
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("compare", help="margin/bound diff of two classifiers")
    p.add_argument("classifier_a")
    p.add_argument("classifier_b")
    p.add_argument("dataset")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else 0
    if not 0 < getattr(args, "delta", 0.05) < 1:
        print("delta must be in (0, 1)", file=sys.stderr)
        return EXIT_CONFIG
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
