"""Channel pruning for sequential chains.

Every prunable layer except the embedding head loses floor(rho * C_out) of its
output channels, ranked by the L1 norm of the channel's weight slice plus its
absolute bias (ties by ascending channel index). The removal is propagated to
BatchNorm statistics, through Flatten, and into the input slices of the next
Dense or Conv2d layer, so the pruned model has genuinely smaller tensors.
"""
from __future__ import annotations

import logging
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from app.core.errors import UnsupportedTopology
from app.model.layers import LayerKind
from app.model.network import Model
from app.pruning.masks import check_rho


logger = logging.getLogger(__name__)


class PlanEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    layer: int
    removed: tuple[int, ...]
    kept_units: int

    @field_validator("removed")
    @classmethod
    def _strictly_increasing(cls, value: tuple[int, ...]) -> tuple[int, ...]:
        if any(b <= a for a, b in zip(value, value[1:])) or any(v < 0 for v in value):
            raise ValueError("removed channel indices must be non-negative and strictly increasing")
        return value


class StructuredPlan(BaseModel):
    model_config = ConfigDict(frozen=True)

    rho: float
    entries: tuple[PlanEntry, ...] = ()

    @property
    def is_empty(self) -> bool:
        return not self.entries

    def removed_for(self, layer: int) -> tuple[int, ...]:
        for entry in self.entries:
            if entry.layer == layer:
                return entry.removed
        return ()


def channel_importance(weight: np.ndarray, bias: np.ndarray) -> np.ndarray:
    wide = np.abs(weight.astype(np.float64)).reshape(weight.shape[0], -1)
    return np.einsum("ij->i", wide) + np.abs(bias.astype(np.float64))


def build_structured_plan(model: Model, rho: float) -> StructuredPlan:
    rho = check_rho(rho)
    entries = []
    for index, (layer, group) in enumerate(zip(model.layers, model.params)):
        if not layer.prunable or layer.embedding_head:
            continue
        units = layer.out_units
        count = min(units - 1, int(math.floor(rho * units + 1e-9)))
        if count <= 0:
            continue
        order = np.argsort(channel_importance(group[0], group[1]), kind="stable")
        removed = tuple(sorted(int(c) for c in order[:count]))
        entries.append(PlanEntry(layer=index, removed=removed, kept_units=units - count))
    logger.debug("Structured plan rho=%s layers=%s", rho, [(e.layer, len(e.removed)) for e in entries])
    return StructuredPlan(rho=rho, entries=tuple(entries))


def _keep(total: int, removed: tuple[int, ...] | np.ndarray) -> np.ndarray:
    keep = np.ones(total, dtype=bool)
    keep[np.asarray(removed, dtype=np.int64)] = False
    return keep


def apply_structured(model: Model, plan: StructuredPlan) -> Model:
    if plan.is_empty:
        return model

    shapes = model.layer_shapes()
    layers = list(model.layers)
    params = [list(group) for group in model.params]
    pending: np.ndarray | None = None  # feature/channel indices removed upstream, not yet consumed

    for index, layer in enumerate(model.layers):
        kind = layer.kind
        in_shape = shapes[index]
        updates: dict = {}

        if pending is not None:
            if kind == LayerKind.DENSE:
                params[index][0] = params[index][0][:, _keep(layer.in_features, pending)]
                updates["in_features"] = layer.in_features - len(pending)
                pending = None
            elif kind == LayerKind.CONV2D:
                params[index][0] = params[index][0][:, _keep(layer.in_channels, pending)]
                updates["in_channels"] = layer.in_channels - len(pending)
                pending = None
            elif kind == LayerKind.BATCHNORM:
                keep = _keep(layer.num_features, pending)
                params[index] = [stat[keep] for stat in params[index]]
                updates["num_features"] = int(keep.sum())
            elif kind == LayerKind.FLATTEN and len(in_shape) == 3:
                spatial = in_shape[1] * in_shape[2]
                pending = (pending[:, None] * spatial + np.arange(spatial)[None, :]).reshape(-1)
            elif kind in (LayerKind.RELU, LayerKind.GLOBAL_AVG_POOL, LayerKind.FLATTEN):
                pass
            else:
                raise UnsupportedTopology(f"removed channels of an upstream layer reach {kind} at layer {index}")

        removed = plan.removed_for(index)
        if removed:
            if not layer.prunable or layer.embedding_head:
                raise UnsupportedTopology(f"layer {index} ({kind}) cannot lose output channels")
            keep = _keep(layer.out_units, removed)
            params[index][0] = params[index][0][keep]
            params[index][1] = params[index][1][keep]
            field = "out_features" if kind == LayerKind.DENSE else "out_channels"
            updates[field] = int(keep.sum())
            pending = np.asarray(removed, dtype=np.int64)

        if updates:
            layers[index] = layer.model_copy(update=updates)

    if pending is not None:
        raise UnsupportedTopology("removed channels have no downstream consumer")

    pruned = Model(layers=layers, params=params, input_shape=model.input_shape)
    logger.info("Structured pruning applied rho=%s params %s -> %s", plan.rho, model.n_prunable, pruned.n_prunable)
    return pruned
