"""Binary MLP classifier (50, 32, 16, 8, 1) built on plain numpy.

Three ReLU hidden layers feed one sigmoid output neuron. Training is
binary cross-entropy under Adam. All parameter containers are immutable
snapshots; every optimizer step produces fresh arrays, so concurrent
training of disjoint clients needs no locking.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .embeddings import PhraseVector
from .sampling import ClientDataset

LAYER_SIZES = (50, 32, 16, 8, 1)

BETA1 = 0.9
BETA2 = 0.999
EPS_HAT = 1e-8

# p is clamped here inside the loss so log never sees 0; the clamp's
# derivative (zero outside the band) is honored by the backward pass.
LOSS_CLAMP = 1e-7
# forward output is kept strictly inside (0,1) even when sigmoid underflows
OUTPUT_CLIP = 1e-12


def _frozen_array(values, shape: tuple[int, ...], what: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.shape != shape:
        raise ValueError(f"{what}: expected shape {shape}, got {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError(f"{what}: non-finite entries")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class MlpParameters:
    """Weights and biases of the four layers, shape-checked and finite."""

    layers: tuple[tuple[np.ndarray, np.ndarray], ...]

    def __post_init__(self):
        if len(self.layers) != len(LAYER_SIZES) - 1:
            raise ValueError(f"expected {len(LAYER_SIZES) - 1} layers, got {len(self.layers)}")
        checked = []
        for i, (w, b) in enumerate(self.layers):
            fan_in, fan_out = LAYER_SIZES[i], LAYER_SIZES[i + 1]
            checked.append((
                _frozen_array(w, (fan_in, fan_out), f"layer {i} weights"),
                _frozen_array(b, (fan_out,), f"layer {i} biases"),
            ))
        object.__setattr__(self, "layers", tuple(checked))


@dataclass(frozen=True)
class AdamState:
    """Adam moments matching MlpParameters' shapes, plus the step count."""

    learning_rate: float
    first_moment: tuple[tuple[np.ndarray, np.ndarray], ...]
    second_moment: tuple[tuple[np.ndarray, np.ndarray], ...]
    step_count: int = 0

    @classmethod
    def fresh(cls, learning_rate: float) -> "AdamState":
        zeros = tuple(
            (np.zeros((LAYER_SIZES[i], LAYER_SIZES[i + 1])), np.zeros(LAYER_SIZES[i + 1]))
        for i in range(len(LAYER_SIZES) - 1))
        return cls(learning_rate=learning_rate, first_moment=zeros,
                   second_moment=zeros, step_count=0)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.001
    batch_size: int = 32
    local_epochs: int = 5

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        if self.local_epochs < 1:
            raise ValueError("local_epochs must be at least 1")


def init_params(rng: np.random.Generator) -> MlpParameters:
    """Glorot-uniform weights, zero biases."""
    layers = []
    for fan_in, fan_out in zip(LAYER_SIZES, LAYER_SIZES[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        w = rng.uniform(-limit, limit, size=(fan_in, fan_out))
        layers.append((w, np.zeros(fan_out)))
    return MlpParameters(layers=tuple(layers))


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def forward_batch(params: MlpParameters, x: np.ndarray) -> np.ndarray:
    """Probabilities for a (n, 50) batch, each strictly inside (0, 1)."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != LAYER_SIZES[0]:
        raise ValueError(f"expected shape (n, {LAYER_SIZES[0]}), got {x.shape}")
    if not np.isfinite(x).all():
        raise ValueError("non-finite input components")
    h = x
    for w, b in params.layers[:-1]:
        h = np.maximum(h @ w + b, 0.0)
    w, b = params.layers[-1]
    p = _sigmoid(h @ w + b)[:, 0]
    return np.clip(p, OUTPUT_CLIP, 1.0 - OUTPUT_CLIP)


def forward(params: MlpParameters, x) -> float:
    """Probability for a single phrase vector or length-50 array."""
    if isinstance(x, PhraseVector):
        x = x.values
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (LAYER_SIZES[0],):
        raise ValueError(f"expected shape ({LAYER_SIZES[0]},), got {x.shape}")
    return float(forward_batch(params, x[None, :])[0])


def _loss_and_grad_arrays(params: MlpParameters, x: np.ndarray,
                          y: np.ndarray) -> tuple[float, tuple]:
    n = x.shape[0]
    pre: list[np.ndarray] = []
    acts: list[np.ndarray] = [x]
    h = x
    for w, b in params.layers[:-1]:
        z = h @ w + b
        pre.append(z)
        h = np.maximum(z, 0.0)
        acts.append(h)
    w_out, b_out = params.layers[-1]
    z_out = h @ w_out + b_out
    p = np.clip(_sigmoid(z_out)[:, 0], OUTPUT_CLIP, 1.0 - OUTPUT_CLIP)

    pc = np.clip(p, LOSS_CLAMP, 1.0 - LOSS_CLAMP)
    loss = float(np.mean(-(y * np.log(pc) + (1.0 - y) * np.log(1.0 - pc))))

    # d(loss)/d(z_out); zero where the clamp flattened the loss
    active = (p > LOSS_CLAMP) & (p < 1.0 - LOSS_CLAMP)
    dz = (np.where(active, p - y, 0.0) / n)[:, None]

    grads: list[tuple[np.ndarray, np.ndarray]] = []
    grads.append((acts[-1].T @ dz, dz.sum(axis=0)))
    upstream = dz @ w_out.T
    for i in range(len(params.layers) - 2, -1, -1):
        dzi = upstream * (pre[i] > 0.0)
        grads.append((acts[i].T @ dzi, dzi.sum(axis=0)))
        if i > 0:
            upstream = dzi @ params.layers[i][0].T
    grads.reverse()
    return loss, tuple(grads)


def loss_and_gradient(params: MlpParameters,
                      batch: Sequence[tuple]) -> tuple[float, tuple]:
    """Mean binary cross-entropy and its exact gradient over a batch.

    Batch elements are (feature, label) pairs; features may be
    PhraseVectors or length-50 arrays. The gradient mirrors
    MlpParameters' layer structure as (weight_grad, bias_grad) pairs.
    """
    if not batch:
        raise ValueError("batch must be non-empty")
    feats = [f.values if isinstance(f, PhraseVector) else np.asarray(f, dtype=np.float64)
             for f, _ in batch]
    x = np.stack(feats)
    y = np.array([label for _, label in batch], dtype=np.float64)
    return _loss_and_grad_arrays(params, x, y)


def adam_update(theta: np.ndarray, grad: np.ndarray, m: np.ndarray, v: np.ndarray,
                step: int, learning_rate: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """One bias-corrected Adam update on a single array.

    `step` is the 1-based count including this update. Returns the new
    (theta, m, v) without touching the inputs.
    """
    m_new = BETA1 * m + (1.0 - BETA1) * grad
    v_new = BETA2 * v + (1.0 - BETA2) * grad * grad
    m_hat = m_new / (1.0 - BETA1 ** step)
    v_hat = v_new / (1.0 - BETA2 ** step)
    theta_new = theta - learning_rate * m_hat / (np.sqrt(v_hat) + EPS_HAT)
    return theta_new, m_new, v_new


def adam_step(params: MlpParameters, grad: tuple,
              state: AdamState) -> tuple[MlpParameters, AdamState]:
    """Apply one Adam step across every layer; returns fresh snapshots."""
    for gw, gb in grad:
        if not (np.isfinite(gw).all() and np.isfinite(gb).all()):
            raise ValueError("non-finite gradient")
    step = state.step_count + 1
    new_layers, new_m, new_v = [], [], []
    for (w, b), (gw, gb), (mw, mb), (vw, vb) in zip(
            params.layers, grad, state.first_moment, state.second_moment):
        w2, mw2, vw2 = adam_update(w, gw, mw, vw, step, state.learning_rate)
        b2, mb2, vb2 = adam_update(b, gb, mb, vb, step, state.learning_rate)
        new_layers.append((w2, b2))
        new_m.append((mw2, mb2))
        new_v.append((vw2, vb2))
    return (
        MlpParameters(layers=tuple(new_layers)),
        AdamState(learning_rate=state.learning_rate, first_moment=tuple(new_m),
                  second_moment=tuple(new_v), step_count=step),
    )


def train_local(params: MlpParameters, dataset: ClientDataset, config: TrainConfig,
                rng: np.random.Generator) -> MlpParameters:
    """Run local_epochs of minibatch Adam over the client's examples.

    Each epoch reshuffles with the caller's stream; the last short batch
    is trained on. A fresh optimizer state is used per call.
    """
    if len(dataset) == 0:
        raise ValueError("empty client")
    x = dataset.feature_matrix()
    y = dataset.label_vector()
    n = x.shape[0]
    state = AdamState.fresh(config.learning_rate)
    for _ in range(config.local_epochs):
        order = rng.permutation(n)
        for start in range(0, n, config.batch_size):
            idx = order[start:start + config.batch_size]
            _, grad = _loss_and_grad_arrays(params, x[idx], y[idx])
            params, state = adam_step(params, grad, state)
    return params


def mean_loss(params: MlpParameters, dataset: ClientDataset) -> float:
    """Mean binary cross-entropy of the current params on a dataset."""
    if len(dataset) == 0:
        raise ValueError("empty client")
    loss, _ = _loss_and_grad_arrays(params, dataset.feature_matrix(),
                                    dataset.label_vector())
    return loss


def save_checkpoint(params: MlpParameters, path: str) -> None:
    """Write layer arrays to an .npz file that round-trips bit-exactly."""
    payload = {"layer_sizes": np.array(LAYER_SIZES, dtype=np.int64)}
    for i, (w, b) in enumerate(params.layers):
        payload[f"w{i}"] = w
        payload[f"b{i}"] = b
    np.savez(path, **payload)


def load_checkpoint(path: str) -> MlpParameters:
    with np.load(path) as data:
        sizes = tuple(int(s) for s in data["layer_sizes"])
        if sizes != LAYER_SIZES:
            raise ValueError(f"checkpoint layer sizes {sizes} do not match {LAYER_SIZES}")
        layers = tuple((data[f"w{i}"], data[f"b{i}"])
                       for i in range(len(LAYER_SIZES) - 1))
    return MlpParameters(layers=layers)
