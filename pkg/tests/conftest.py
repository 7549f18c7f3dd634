import pytest

from nlstplan.catalog import load_dataset
from nlstplan.data_paths import datasets_dir, default_model_path
from nlstplan.nlu import TypeClassifier


@pytest.fixture(scope="session")
def minicity():
    return load_dataset(datasets_dir() / "minicity")


@pytest.fixture(scope="session")
def london():
    return load_dataset(datasets_dir() / "minicity-london")


@pytest.fixture(scope="session")
def classifier():
    return TypeClassifier.load(default_model_path())
