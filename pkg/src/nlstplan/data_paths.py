"""Locations of the bundled datasets, templates, models, and schemas.

The NLSTPLAN_DATA environment variable overrides the dataset directory.
"""

from __future__ import annotations

import os
from importlib import resources
from pathlib import Path


def package_data_dir() -> Path:
    return Path(str(resources.files("nlstplan").joinpath("data")))


def datasets_dir(override: str | Path | None = None) -> Path:
    if override:
        return Path(override)
    env = os.environ.get("NLSTPLAN_DATA")
    if env:
        return Path(env)
    return package_data_dir() / "datasets"


def default_model_path() -> Path:
    return package_data_dir() / "models" / "classifier.json"


def schema_path(name: str) -> Path:
    return package_data_dir() / "schemas" / name
