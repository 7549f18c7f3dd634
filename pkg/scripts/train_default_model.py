#!/usr/bin/env python3
"""Retrain the bundled query-type classifier (deterministic).

The model ships with the package and loads at service startup; retraining
is a CLI/offline action, never an endpoint.
"""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from nlstplan import corpus as corpus_mod
from nlstplan.catalog import load_dataset
from nlstplan.data_paths import datasets_dir, default_model_path
from nlstplan.nlu.classifier import train_classifier

PER_DB = 2100
SEEDS = {"minicity": 11, "minicity-london": 12}


def main() -> None:
    entries = []
    for name, seed in SEEDS.items():
        db = load_dataset(datasets_dir() / name)
        entries.extend(corpus_mod.generate(db, PER_DB, seed=seed))
    clf = train_classifier(entries, seed=0)
    out = default_model_path()
    out.parent.mkdir(parents=True, exist_ok=True)
    clf.save(out)
    print(f"trained on {len(entries)} entries; wrote {out}")


if __name__ == "__main__":
    main()
