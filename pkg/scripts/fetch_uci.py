#!/usr/bin/env python3
"""Download the UCI benchmark datasets that cannot be generated locally.

Requires ordinary network access (not available in every sandbox).  Each
dataset is converted to the headered-CSV format the loader expects, with a
schema sidecar when categorical columns need forcing.
"""

import csv
import io
import json
import urllib.request
import zipfile
from pathlib import Path

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"

OUT = Path(__file__).resolve().parent.parent / "data"


def write_csv(name, header, rows, categorical=None):
    path = OUT / f"{name}.csv"
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    if categorical:
        (OUT / f"{name}.schema.json").write_text(
            json.dumps({"label": "class", "categorical": categorical})
        )
    print(f"wrote {path} ({len(rows)} rows)")


def fetch(url: str) -> bytes:
    print(f"fetching {url}")
    with urllib.request.urlopen(url, timeout=60) as resp:
        return resp.read()


def fetch_sonar():
    raw = fetch(f"{UCI}/undocumented/connectionist-bench/sonar/sonar.all-data")
    rows = [line.split(",") for line in raw.decode().strip().splitlines()]
    header = [f"band{i}" for i in range(60)] + ["class"]
    write_csv("sonar", header, rows)


def fetch_credit_a():
    raw = fetch(f"{UCI}/credit-screening/crx.data")
    rows = [line.split(",") for line in raw.decode().strip().splitlines()]
    header = [f"A{i + 1}" for i in range(15)] + ["class"]
    write_csv("credit-a", header, rows)


def fetch_german():
    raw = fetch(f"{UCI}/statlog/german/german.data")
    rows = [line.split() for line in raw.decode().strip().splitlines()]
    header = [f"A{i + 1}" for i in range(20)] + ["class"]
    write_csv("german", header, rows)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for job in (fetch_sonar, fetch_credit_a, fetch_german):
        try:
            job()
        except Exception as exc:  # keep going; report at the end
            print(f"FAILED {job.__name__}: {exc}")


if __name__ == "__main__":
    main()
