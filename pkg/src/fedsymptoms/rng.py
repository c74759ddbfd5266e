"""Seed-derived random streams.

Every stochastic step draws from its own generator, keyed by the master
seed plus integer labels, so results never depend on scheduling order or
on how many draws an unrelated step consumed.
"""

from __future__ import annotations

import numpy as np

# Stream labels. Values are part of the reproducibility contract: changing
# them changes every downstream result for a given master seed.
_INIT = 0
_POPULATION = 1
_SELECTION = 2
_CLIENT_DATA = 3
_CLIENT_TRAIN = 4


def _stream(master_seed: int, *key: int) -> np.random.Generator:
    seq = np.random.SeedSequence(master_seed, spawn_key=tuple(key))
    return np.random.Generator(np.random.PCG64(seq))


def init_stream(master_seed: int) -> np.random.Generator:
    """Stream used once to initialize the global model parameters."""
    return _stream(master_seed, _INIT)


def population_stream(master_seed: int) -> np.random.Generator:
    """Stream used once to draw client sizes and country assignments."""
    return _stream(master_seed, _POPULATION)


def selection_stream(master_seed: int, round_index: int) -> np.random.Generator:
    """Per-round stream for sampling the participating clients."""
    return _stream(master_seed, _SELECTION, round_index)


def client_data_stream(master_seed: int, client_id: int, round_index: int) -> np.random.Generator:
    """Per-(client, round) stream driving survey synthesis."""
    return _stream(master_seed, _CLIENT_DATA, client_id, round_index)


def client_train_stream(master_seed: int, client_id: int, round_index: int) -> np.random.Generator:
    """Per-(client, round) stream driving minibatch shuffling."""
    return _stream(master_seed, _CLIENT_TRAIN, client_id, round_index)
