#!/usr/bin/env python3
"""Generate the locally constructible benchmark CSVs into data/.

- iris.csv      : the classic 150x4 three-class sample (via scikit-learn).
- breast-w.csv  : the Wisconsin diagnostic breast cancer sample
                  (scikit-learn's bundled copy; 569x30).
- artificial.csv: LED-display generator, 10 digit classes over 7 segment
                  attributes, each segment flipped with probability 0.1;
                  5109 instances, seeded.

The remaining benchmark datasets (sonar, credit-a, german) are UCI
downloads; see fetch_uci.py.
"""

import argparse
import csv
from pathlib import Path

import numpy as np

LED_PATTERNS = {
    0: (1, 1, 1, 0, 1, 1, 1),
    1: (0, 0, 1, 0, 0, 1, 0),
    2: (1, 0, 1, 1, 1, 0, 1),
    3: (1, 0, 1, 1, 0, 1, 1),
    4: (0, 1, 1, 1, 0, 1, 0),
    5: (1, 1, 0, 1, 0, 1, 1),
    6: (1, 1, 0, 1, 1, 1, 1),
    7: (1, 0, 1, 0, 0, 1, 0),
    8: (1, 1, 1, 1, 1, 1, 1),
    9: (1, 1, 1, 1, 0, 1, 1),
}


def write_csv(path: Path, header, rows):
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows)")


def make_iris(out_dir: Path):
    from sklearn.datasets import load_iris

    data = load_iris()
    names = [n.replace(" (cm)", "").replace(" ", "_") for n in data.feature_names]
    rows = [
        [f"{v:.1f}" for v in x] + [data.target_names[y]]
        for x, y in zip(data.data, data.target)
    ]
    write_csv(out_dir / "iris.csv", names + ["class"], rows)


def make_breast_w(out_dir: Path):
    from sklearn.datasets import load_breast_cancer

    data = load_breast_cancer()
    names = [n.replace(" ", "_") for n in data.feature_names]
    rows = [
        [f"{v:.6g}" for v in x] + [data.target_names[y]]
        for x, y in zip(data.data, data.target)
    ]
    write_csv(out_dir / "breast-w.csv", names + ["class"], rows)


def make_artificial(out_dir: Path, n: int = 5109, noise: float = 0.1, seed: int = 7):
    rng = np.random.default_rng(seed)
    digits = rng.integers(0, 10, size=n)
    rows = []
    for digit in digits:
        segs = np.array(LED_PATTERNS[int(digit)])
        flips = rng.random(7) < noise
        segs = np.where(flips, 1 - segs, segs)
        rows.append([str(int(s)) for s in segs] + [f"digit{int(digit)}"])
    write_csv(out_dir / "artificial.csv", [f"seg{i}" for i in range(7)] + ["class"], rows)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data"))
    args = parser.parse_args()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    make_iris(out_dir)
    make_breast_w(out_dir)
    make_artificial(out_dir)


if __name__ == "__main__":
    main()
