"""FedAvg orchestration over the four simulated client topologies.

One round = broadcast the global parameters, synthesize fresh survey
data per selected client, train locally, aggregate the surviving
updates as a weighted mean. Every random draw comes from a stream keyed
by (master seed, purpose, client, round), so results are independent of
scheduling order.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import rng as streams
from .embeddings import EmbeddingTable
from .mlp import (
    MlpParameters,
    TrainConfig,
    init_params,
    mean_loss,
    train_local,
)
from .sampling import NoiseMechanism, synthesize_client
from .surveys import CountrySurvey, assign_countries, build_distribution

SIMULATION_IDS = ("I", "II", "III", "IV")

# size range (min, max persons) and client count per simulation
_TOPOLOGY = {
    "I": ((60000, 60000), 20),
    "II": ((10000, 20000), 80),
    "III": ((500, 2000), 900),
    "IV": ((2, 12), 100000),
}

# IV defaults to partial participation to keep desk runs bounded
_DEFAULT_PARTICIPATION = {"I": 1.0, "II": 1.0, "III": 1.0, "IV": 0.05}

WEIGHT_BY_EXAMPLES = "by_examples"
WEIGHT_UNIFORM = "uniform"


def scaled_count(value: int, scale: float) -> int:
    """Scale a count down, never below 1.

    The product is rounded to 9 decimals before ceiling so that float
    artifacts like 900 * 0.1 = 90.000000000000014 still map to 90.
    """
    return max(1, math.ceil(round(value * scale, 9)))


@dataclass(frozen=True)
class SimulationSpec:
    """Client topology and schedule of one simulation."""

    id: str
    size_range: tuple[int, int]
    n_clients: int
    local_epochs: int = 5
    global_epochs: int = 5
    participation_fraction: float = 1.0

    def __post_init__(self):
        if self.id not in SIMULATION_IDS:
            raise ValueError(f"unknown simulation id {self.id!r}")
        lo, hi = self.size_range
        if not (1 <= lo <= hi):
            raise ValueError(f"bad size_range {self.size_range}")
        if self.n_clients < 1:
            raise ValueError("n_clients must be positive")
        if not 0.0 < self.participation_fraction <= 1.0:
            raise ValueError("participation_fraction must be in (0, 1]")
        if self.participation_fraction * self.n_clients < 1.0:
            raise ValueError("participation_fraction selects no clients")
        if self.local_epochs < 0 or self.global_epochs < 0:
            raise ValueError("epoch counts must be non-negative")


def simulation_spec(sim_id: str, scale: float = 1.0,
                    participation_fraction: float | None = None,
                    local_epochs: int = 5, global_epochs: int = 5) -> SimulationSpec:
    """Build a spec from the standard topology table, optionally scaled.

    `scale` multiplies both the per-client size range and the client
    count, rounding up to at least 1, so desk-size runs keep the shape
    of the full topology.
    """
    if sim_id not in _TOPOLOGY:
        raise ValueError(f"unknown simulation id {sim_id!r}")
    if not 0.0 < scale <= 1.0:
        raise ValueError("scale must be in (0, 1]")
    (lo, hi), n_clients = _TOPOLOGY[sim_id]
    if participation_fraction is None:
        participation_fraction = _DEFAULT_PARTICIPATION[sim_id]
    return SimulationSpec(
        id=sim_id,
        size_range=(scaled_count(lo, scale), scaled_count(hi, scale)),
        n_clients=scaled_count(n_clients, scale),
        local_epochs=local_epochs,
        global_epochs=global_epochs,
        participation_fraction=participation_fraction,
    )


@dataclass(frozen=True)
class ClientSlot:
    client_id: int
    n_persons: int
    country_index: int


@dataclass(frozen=True)
class GlobalModel:
    params: MlpParameters
    round_index: int = 0


@dataclass(frozen=True)
class RoundReport:
    round_index: int
    participating_clients: int
    skipped_empty_clients: int
    mean_local_loss: float
    wall_time: float


@dataclass(frozen=True)
class FederationConfig:
    """Everything about a run that is not topology or data."""

    noise: NoiseMechanism
    train: TrainConfig = field(default_factory=TrainConfig)
    weighting: str = WEIGHT_BY_EXAMPLES
    fixed_client_data: bool = False

    def __post_init__(self):
        if self.weighting not in (WEIGHT_BY_EXAMPLES, WEIGHT_UNIFORM):
            raise ValueError(f"unknown weighting {self.weighting!r}")


def build_population(spec: SimulationSpec, surveys: list[CountrySurvey],
                     rng: np.random.Generator) -> list[ClientSlot]:
    """Fix each client's size and country for the whole run."""
    lo, hi = spec.size_range
    sizes = rng.integers(lo, hi + 1, size=spec.n_clients)
    countries = assign_countries(spec.n_clients, surveys, rng)
    return [ClientSlot(client_id=i, n_persons=int(sizes[i]), country_index=countries[i])
            for i in range(spec.n_clients)]


def fedavg_aggregate(updates: list[tuple[MlpParameters, int]]) -> MlpParameters:
    """Weighted mean of parameter sets, weights n_k / sum(n_k).

    Computed as first update plus the weighted deltas of the rest, so a
    round where every client returns the same parameters reproduces them
    exactly, whatever the weights. Summation follows list order; callers
    pass updates in ascending client_id order so reruns are bit-identical.
    """
    if not updates:
        raise ValueError("no surviving clients this round")
    for _, n in updates:
        if n < 1:
            raise ValueError("update weights must be positive integers")
    total = sum(n for _, n in updates)
    base = updates[0][0].layers
    deltas = [(np.zeros_like(w), np.zeros_like(b)) for w, b in base]
    for params, n in updates[1:]:
        weight = n / total
        deltas = [(dw + weight * (w - bw), db + weight * (b - bb))
                  for (dw, db), (w, b), (bw, bb)
                  in zip(deltas, params.layers, base)]
    return MlpParameters(layers=tuple(
        (bw + dw, bb + db) for (bw, bb), (dw, db) in zip(base, deltas)))


def run_round(model: GlobalModel, population: list[ClientSlot], spec: SimulationSpec,
              distributions: list, corpus, embeddings: EmbeddingTable,
              config: FederationConfig, master_seed: int) -> tuple[GlobalModel, RoundReport]:
    """Execute one broadcast / local-train / aggregate cycle."""
    started = time.perf_counter()
    round_index = model.round_index

    n_selected = math.ceil(spec.participation_fraction * len(population))
    selection = streams.selection_stream(master_seed, round_index)
    chosen = sorted(selection.choice(len(population), size=n_selected, replace=False))

    updates: list[tuple[MlpParameters, int]] = []
    losses: list[float] = []
    skipped = 0
    for idx in chosen:
        slot = population[idx]
        data_round = 0 if config.fixed_client_data else round_index
        data_rng = streams.client_data_stream(master_seed, slot.client_id, data_round)
        dataset = synthesize_client(
            slot.client_id, slot.n_persons, distributions[slot.country_index],
            corpus, config.noise, embeddings, data_rng)
        if len(dataset) == 0:
            skipped += 1
            continue
        train_rng = streams.client_train_stream(master_seed, slot.client_id, round_index)
        local = train_local(model.params, dataset, config.train, train_rng)
        losses.append(mean_loss(local, dataset))
        weight = len(dataset) if config.weighting == WEIGHT_BY_EXAMPLES else 1
        updates.append((local, weight))

    new_params = fedavg_aggregate(updates)
    report = RoundReport(
        round_index=round_index + 1,
        participating_clients=len(updates),
        skipped_empty_clients=skipped,
        mean_local_loss=float(np.mean(losses)),
        wall_time=time.perf_counter() - started,
    )
    return GlobalModel(params=new_params, round_index=round_index + 1), report


def run_simulation(spec: SimulationSpec, surveys: list[CountrySurvey], corpus,
                   embeddings: EmbeddingTable, config: FederationConfig,
                   master_seed: int) -> tuple[list[GlobalModel], list[RoundReport]]:
    """Run global_epochs rounds; snapshot after init and every round.

    The population stream never sees the noise settings, so sweeps at a
    fixed seed share client sizes and countries across noise levels.
    """
    params = init_params(streams.init_stream(master_seed))
    population = build_population(spec, surveys, streams.population_stream(master_seed))
    distributions = [build_distribution(s) for s in surveys]

    model = GlobalModel(params=params, round_index=0)
    snapshots = [model]
    reports: list[RoundReport] = []
    for _ in range(spec.global_epochs):
        model, report = run_round(model, population, spec, distributions,
                                  corpus, embeddings, config, master_seed)
        snapshots.append(model)
        reports.append(report)
    return snapshots, reports
