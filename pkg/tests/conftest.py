import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from grasplab.classifier import train_scg
from grasplab.nlu.factors import train_factors
from grasplab.nlu.ground import (Grounder, load_default_corpus,
                                 load_default_grammar)
from grasplab.vision import ObjectClass, generate_corpus


@pytest.fixture(scope="session")
def ext_grammar():
    return load_default_grammar("extended")


@pytest.fixture(scope="session")
def base_grammar():
    return load_default_grammar("base")


@pytest.fixture(scope="session")
def corpus():
    return load_default_corpus()


@pytest.fixture(scope="session")
def factor_model(ext_grammar, corpus):
    return train_factors(corpus, ext_grammar)


@pytest.fixture(scope="session")
def grounder(ext_grammar, factor_model):
    return Grounder(ext_grammar, factor_model)


@pytest.fixture(scope="session")
def tiny_store():
    return generate_corpus(list(ObjectClass)[:6], 12, seed=5)


@pytest.fixture(scope="session")
def tiny_model(tiny_store):
    model, _ = train_scg(tiny_store, restarts=1, max_epochs=25, patience=6,
                         seed=0)
    return model
