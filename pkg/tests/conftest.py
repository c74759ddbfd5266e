"""Shared fixtures: bundled data assets and small synthetic stand-ins."""

import numpy as np
import pytest

from fedsymptoms import assets
from fedsymptoms.embeddings import EmbeddingTable, PhraseVector, load_embeddings
from fedsymptoms.evaluation import build_evalset
from fedsymptoms.mlp import LAYER_SIZES, forward_batch
from fedsymptoms.sampling import ClientDataset, LabeledExample
from fedsymptoms.surveys import (
    CountrySurvey,
    MedicalCorpus,
    build_distribution,
    load_corpus,
    load_surveys,
)


@pytest.fixture(scope="session")
def table():
    return load_embeddings(assets.default_embeddings_path(), 50)


@pytest.fixture(scope="session")
def surveys():
    return load_surveys(assets.default_surveys_path())


@pytest.fixture(scope="session")
def corpus():
    return load_corpus(assets.default_corpus_path())


@pytest.fixture(scope="session")
def evalset(surveys):
    return build_evalset(surveys)


@pytest.fixture(scope="session")
def distributions(surveys):
    return [build_distribution(s) for s in surveys]


def tiny_table(tokens, dimension=4, seed=0):
    """Deterministic small embedding table for unit tests."""
    rng = np.random.default_rng(seed)
    entries = {}
    for token in tokens:
        vec = rng.standard_normal(dimension)
        vec.flags.writeable = False
        entries[token] = vec
    return EmbeddingTable(dimension=dimension, entries=entries)


@pytest.fixture
def tiny_survey():
    return CountrySurvey(
        country="Testland",
        total=1000,
        symptom_counts={"alpha": 800, "beta": 200, "gamma": 0},
    )


@pytest.fixture
def tiny_corpus():
    return MedicalCorpus(terms=("alpha", "beta", "gamma", "delta", "epsilon"))


def separable_dataset(seed, n=200):
    """Balanced fixture on the first axis: positives at +e1, negatives at -e1.

    The seed only shuffles the interleaving; the points themselves are fixed.
    """
    rng = np.random.default_rng(seed)
    examples = []
    for label, sign in ((1, 1.0), (0, -1.0)):
        vec = np.zeros(LAYER_SIZES[0])
        vec[0] = sign
        pv = PhraseVector(values=vec, source_phrase="pt", oov_tokens=0)
        examples.extend(LabeledExample(feature=pv, label=label, source_symptom="pt")
                        for _ in range(n // 2))
    order = rng.permutation(len(examples))
    return ClientDataset(client_id=0, examples=tuple(examples[i] for i in order),
                         n_persons=n)


def training_accuracy(params, dataset):
    p = forward_batch(params, dataset.feature_matrix())
    return float(np.mean((p >= 0.5) == (dataset.label_vector() == 1.0)))
