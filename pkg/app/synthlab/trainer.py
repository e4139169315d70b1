"""Toy embedding trainer: a Dense/ReLU chain under a cosine-softmax loss.

Gradients are written out by hand for the four pieces the network uses
(dense, relu, l2 normalize, cosine softmax). Master weights are float64;
the returned Model stores float32.
"""
from __future__ import annotations

from collections.abc import Mapping, Sequence
import logging
import math
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from app.core.errors import ConfigInvalid, NonFiniteLoss, ShapeMismatch, UnsupportedArch
from app.model import layers as L
from app.model.layers import LayerKind, LayerSpec
from app.model.network import Model, forward
from app.synthlab.generator import SynthDataset
from app.tensor.rng import derive_rng


logger = logging.getLogger(__name__)

TRAINABLE_KINDS = frozenset({LayerKind.DENSE, LayerKind.RELU, LayerKind.L2_NORMALIZE})
NORM_FLOOR = 1e-12


class TrainConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    arch: list[int] = Field(min_length=2)
    epochs: int = Field(default=60, ge=0)
    lr: float = Field(default=0.1, gt=0)
    batch_size: int = Field(default=32, ge=1)
    scale: float = Field(default=16.0, gt=0)
    weight_decay: float = Field(default=0.0, ge=0)
    train_bias: bool = True
    seed: int = Field(default=0, ge=0)

    @field_validator("arch")
    @classmethod
    def _positive_widths(cls, widths: list[int]) -> list[int]:
        if any(w < 1 for w in widths):
            raise ValueError("layer widths must be >= 1")
        return widths

    @classmethod
    def parse(cls, data: Mapping[str, Any]) -> "TrainConfig":
        try:
            return cls.model_validate(data)
        except ValidationError as exc:
            raise ConfigInvalid(f"invalid train config: {exc.errors()[0]['msg']}") from exc


class TrainingRun(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    model: Model
    class_weights: np.ndarray
    epoch_losses: list[float]

    @property
    def initial_loss(self) -> float:
        return self.epoch_losses[0]

    @property
    def final_loss(self) -> float:
        return self.epoch_losses[-1]


def mlp_layers(widths: Sequence[int]) -> list[LayerSpec]:
    """Dense/ReLU chain over ``widths``; the last dense is the embedding head."""
    if len(widths) < 2:
        raise UnsupportedArch("an MLP needs at least an input and an embedding width")
    specs: list[LayerSpec] = []
    for index, (fan_in, fan_out) in enumerate(zip(widths[:-1], widths[1:])):
        last = index == len(widths) - 2
        specs.append(L.dense(fan_in, fan_out, embedding_head=last))
        if not last:
            specs.append(L.relu())
    specs.append(L.l2_normalize())
    return specs


def check_trainable(specs: Sequence[LayerSpec]) -> list[LayerSpec]:
    unsupported = [s.kind for s in specs if s.kind not in TRAINABLE_KINDS]
    if unsupported:
        raise UnsupportedArch(f"toy trainer handles dense/relu/l2_normalize only, got {unsupported[0]}")
    return list(specs)


def glorot_uniform(fan_in: int, fan_out: int, rng: np.random.Generator) -> np.ndarray:
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_out, fan_in))


def initial_parameters(specs: Sequence[LayerSpec], seed: int) -> list[list[np.ndarray]]:
    """Float64 parameter groups, one per layer; dense biases start at zero."""
    params: list[list[np.ndarray]] = []
    for index, spec in enumerate(check_trainable(specs)):
        if spec.kind == LayerKind.DENSE:
            rng = derive_rng(seed, "init", index)
            params.append([glorot_uniform(spec.in_features, spec.out_features, rng), np.zeros(spec.out_features)])
        else:
            params.append([])
    return params


def initial_class_weights(n_classes: int, d: int, seed: int) -> np.ndarray:
    return glorot_uniform(d, n_classes, derive_rng(seed, "classes"))


def initialize_model(specs: Sequence[LayerSpec], seed: int) -> Model:
    params = initial_parameters(specs, seed)
    return _to_model(specs, params)


def _to_model(specs: Sequence[LayerSpec], params: Sequence[Sequence[np.ndarray]]) -> Model:
    return Model(
        layers=tuple(specs),
        params=[[t.astype(np.float32) for t in group] for group in params],
        input_shape=(specs[0].in_features,),
    )


def _row_normalize(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    norms = np.sqrt(np.einsum("ij,ij->i", m, m))
    return m / np.maximum(norms, NORM_FLOOR)[:, None], norms


def loss_and_grads(
    specs: Sequence[LayerSpec],
    params: Sequence[Sequence[np.ndarray]],
    class_weights: np.ndarray,
    x: np.ndarray,
    labels: np.ndarray,
    scale: float,
) -> tuple[float, list[list[np.ndarray]], np.ndarray]:
    """Mean cosine-softmax cross-entropy over the batch and its exact gradients.

    Returns (loss, per-layer parameter gradients, class-weight gradient).
    """
    h = np.asarray(x, dtype=np.float64)
    inputs: list[np.ndarray] = []
    for spec, group in zip(specs, params):
        inputs.append(h)
        if spec.kind == LayerKind.DENSE:
            h = np.einsum("bi,oi->bo", h, group[0]) + group[1]
        elif spec.kind == LayerKind.RELU:
            h = np.maximum(h, 0.0)
        else:
            h, z_norms = _row_normalize(h)

    e = h
    v_hat, v_norms = _row_normalize(class_weights)
    logits = scale * np.einsum("bd,cd->bc", e, v_hat)
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=1))
    batch = x.shape[0]
    picked = shifted[np.arange(batch), labels]
    loss = float(np.mean(log_z - picked))

    probs = np.exp(shifted - log_z[:, None])
    probs[np.arange(batch), labels] -= 1.0
    d_cos = scale * probs / batch
    d_e = np.einsum("bc,cd->bd", d_cos, v_hat)
    d_vhat = np.einsum("bc,bd->cd", d_cos, e)
    d_v = (d_vhat - v_hat * np.einsum("cd,cd->c", d_vhat, v_hat)[:, None]) / np.maximum(v_norms, NORM_FLOOR)[:, None]

    grads: list[list[np.ndarray]] = [[] for _ in specs]
    upstream = d_e
    for index in range(len(specs) - 1, -1, -1):
        spec, group, below = specs[index], params[index], inputs[index]
        if spec.kind == LayerKind.L2_NORMALIZE:
            radial = np.einsum("bd,bd->b", upstream, e)[:, None]
            upstream = (upstream - e * radial) / np.maximum(z_norms, NORM_FLOOR)[:, None]
        elif spec.kind == LayerKind.DENSE:
            grads[index] = [np.einsum("bo,bi->oi", upstream, below), upstream.sum(axis=0)]
            upstream = np.einsum("bo,oi->bi", upstream, group[0])
        else:
            upstream = upstream * (below > 0.0)
    return loss, grads, d_v


def _dataset_loss(specs, params, class_weights, data: SynthDataset, scale: float) -> float:
    loss, _, _ = loss_and_grads(specs, params, class_weights, data.inputs, data.labels, scale)
    return loss


def sgd_step(tensor: np.ndarray, grad: np.ndarray, lr: float, weight_decay: float) -> None:
    """In-place ``tensor -= lr * (grad + weight_decay * tensor)``."""
    if weight_decay:
        tensor *= 1.0 - lr * weight_decay
    tensor -= lr * grad


def fit(data: SynthDataset, cfg: TrainConfig) -> TrainingRun:
    """Minibatch SGD, single-threaded, fully determined by ``cfg.seed``.

    ``weight_decay`` applies to dense weights and class weights, never to
    biases. With ``train_bias`` off the biases keep their zero initialization,
    which makes every layer scale-invariant under the normalized loss.
    """
    specs = check_trainable(mlp_layers(cfg.arch))
    if data.input_dim != cfg.arch[0]:
        raise ShapeMismatch(f"dataset input_dim={data.input_dim} but arch starts at {cfg.arch[0]}")
    labels = data.labels
    n_classes = int(labels.max()) + 1

    params = initial_parameters(specs, cfg.seed)
    class_weights = initial_class_weights(n_classes, cfg.arch[-1], cfg.seed)
    losses = [_dataset_loss(specs, params, class_weights, data, cfg.scale)]

    n = len(data)
    for epoch in range(cfg.epochs):
        order = derive_rng(cfg.seed, "shuffle", epoch).permutation(n)
        for start in range(0, n, cfg.batch_size):
            batch = order[start:start + cfg.batch_size]
            loss, grads, d_v = loss_and_grads(specs, params, class_weights, data.inputs[batch], labels[batch], cfg.scale)
            if not math.isfinite(loss):
                raise NonFiniteLoss(f"loss became {loss} at epoch {epoch}")
            for group, group_grads in zip(params, grads):
                if not group:
                    continue
                sgd_step(group[0], group_grads[0], cfg.lr, cfg.weight_decay)
                if cfg.train_bias:
                    sgd_step(group[1], group_grads[1], cfg.lr, 0.0)
            sgd_step(class_weights, d_v, cfg.lr, cfg.weight_decay)

        epoch_loss = _dataset_loss(specs, params, class_weights, data, cfg.scale)
        if not math.isfinite(epoch_loss):
            raise NonFiniteLoss(f"loss became {epoch_loss} after epoch {epoch}")
        losses.append(epoch_loss)
        if (epoch + 1) % 10 == 0 or epoch + 1 == cfg.epochs:
            logger.info("Training epoch=%s loss=%.6f", epoch + 1, epoch_loss)

    return TrainingRun(model=_to_model(specs, params), class_weights=class_weights, epoch_losses=losses)


def train_toy_model(data: SynthDataset, cfg: TrainConfig) -> Model:
    return fit(data, cfg).model


def classification_accuracy(run: TrainingRun, data: SynthDataset) -> float:
    """Share of samples whose nearest class weight (by cosine) is their own label."""
    v_hat, _ = _row_normalize(run.class_weights)
    embeddings = np.stack([forward(run.model, x).astype(np.float64) for x in data.inputs])
    predicted = np.argmax(np.einsum("bd,cd->bc", embeddings, v_hat), axis=1)
    return float(np.mean(predicted == data.labels))
