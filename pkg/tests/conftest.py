from pathlib import Path

import pytest

from newsmonitor.corpus import default_gazetteer, load_corpus
from newsmonitor.textprep import load_prep_config, prepare_corpus

RESOURCES = Path(__file__).resolve().parents[1] / "src" / "newsmonitor" / "resources"


@pytest.fixture(scope="session")
def mini_corpus_path():
    return RESOURCES / "mini_corpus.jsonl"


@pytest.fixture(scope="session")
def mini_corpus(mini_corpus_path):
    return load_corpus(mini_corpus_path)


@pytest.fixture(scope="session")
def gazetteer():
    return default_gazetteer()


@pytest.fixture(scope="session")
def prepared_mini(mini_corpus, gazetteer):
    config = load_prep_config()
    return prepare_corpus(mini_corpus, config, gazetteer=gazetteer)
