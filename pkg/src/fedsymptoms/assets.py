"""Paths to the data files bundled with the package."""

from __future__ import annotations

from importlib import resources


def _data_path(name: str) -> str:
    return str(resources.files("fedsymptoms").joinpath("data", name))


def default_embeddings_path() -> str:
    """50-dimensional embedding fixture covering surveys and corpus."""
    return _data_path("mini_embeddings_50d.txt")


def default_surveys_path() -> str:
    """Five-country symptom survey counts."""
    return _data_path("surveys.txt")


def default_corpus_path() -> str:
    """Symptom/condition phrase pool for noise and negative sampling."""
    return _data_path("medical_corpus.txt")
