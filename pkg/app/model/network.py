from __future__ import annotations

from collections.abc import Sequence
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from app.core.errors import ShapeMismatch
from app.model.layers import LayerKind, LayerSpec
from app.tensor import ops


def _frozen(array: np.ndarray, dtype: np.dtype) -> np.ndarray:
    out = np.array(array, dtype=dtype, order="C", copy=True)
    out.flags.writeable = False
    return out


class Model(BaseModel):
    """Sequential network ending in an L2-normalized embedding."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    layers: tuple[LayerSpec, ...]
    params: tuple[tuple[np.ndarray, ...], ...]
    input_shape: tuple[int, ...]

    @model_validator(mode="before")
    @classmethod
    def _freeze_params(cls, data: Any) -> Any:
        if isinstance(data, dict) and "params" in data:
            tensors = [tuple(np.asarray(t) for t in group) for group in data["params"]]
            flat = [t for group in tensors for t in group]
            dtype = np.result_type(*flat, np.float32) if flat else np.dtype(np.float32)
            data = {**data, "params": tuple(tuple(_frozen(t, dtype) for t in group) for group in tensors)}
            data["layers"] = tuple(data["layers"])
            data["input_shape"] = tuple(int(v) for v in data["input_shape"])
        return data

    @model_validator(mode="after")
    def _check_structure(self) -> "Model":
        if not self.layers or self.layers[-1].kind != LayerKind.L2_NORMALIZE:
            raise ShapeMismatch("the last layer must be l2_normalize")
        heads = [i for i, layer in enumerate(self.layers) if layer.embedding_head]
        if len(heads) != 1:
            raise ShapeMismatch(f"exactly one embedding head required, found {len(heads)}")
        head = heads[0]
        if head != len(self.layers) - 2 or self.layers[head].kind != LayerKind.DENSE:
            raise ShapeMismatch("the embedding head must be the dense layer right before l2_normalize")
        if len(self.params) != len(self.layers):
            raise ShapeMismatch(f"{len(self.params)} parameter groups for {len(self.layers)} layers")

        shape = self.input_shape
        for index, (layer, group) in enumerate(zip(self.layers, self.params)):
            expected = layer.param_shapes()
            actual = [t.shape for t in group]
            if actual != expected:
                raise ShapeMismatch(f"layer {index} ({layer.kind}) params {actual}, expected {expected}")
            shape = layer.output_shape(shape)
        return self

    @property
    def d(self) -> int:
        return self.layers[-2].out_features

    @property
    def dtype(self) -> np.dtype:
        for group in self.params:
            for tensor in group:
                return tensor.dtype
        return np.dtype(np.float32)

    @property
    def n_prunable(self) -> int:
        return sum(t.size for layer, group in zip(self.layers, self.params) if layer.prunable for t in group)

    def layer_shapes(self) -> list[tuple[int, ...]]:
        """Input shape of every layer, followed by the output shape."""
        shapes = [self.input_shape]
        for layer in self.layers:
            shapes.append(layer.output_shape(shapes[-1]))
        return shapes

    def replace_params(self, params: Sequence[Sequence[np.ndarray]]) -> "Model":
        return Model(layers=self.layers, params=params, input_shape=self.input_shape)

    def astype(self, dtype) -> "Model":
        return self.replace_params([[t.astype(dtype) for t in group] for group in self.params])

    def bit_equal(self, other: "Model") -> bool:
        if self.layers != other.layers or self.input_shape != other.input_shape:
            return False
        for mine, theirs in zip(self.params, other.params):
            if len(mine) != len(theirs):
                return False
            for a, b in zip(mine, theirs):
                if a.dtype != b.dtype or a.shape != b.shape or a.tobytes() != b.tobytes():
                    return False
        return True


def forward(model: Model, x: np.ndarray) -> np.ndarray:
    """Embed one input; the result has unit L2 norm or ZeroNorm is raised."""
    h = np.asarray(x, dtype=model.dtype)
    if h.shape != model.input_shape:
        raise ShapeMismatch(f"input shape {h.shape} does not match model input {model.input_shape}")

    for layer, group in zip(model.layers, model.params):
        kind = layer.kind
        if kind == LayerKind.DENSE:
            h = ops.dense_forward(h, group[0], group[1])
        elif kind == LayerKind.CONV2D:
            h = ops.conv2d_forward(h, group[0], group[1], stride=layer.stride, pad=layer.pad)
        elif kind == LayerKind.RELU:
            h = ops.relu(h)
        elif kind == LayerKind.BATCHNORM:
            h = ops.batchnorm_apply(h, *group, eps=layer.eps or ops.BATCHNORM_EPS)
        elif kind == LayerKind.GLOBAL_AVG_POOL:
            h = ops.global_avg_pool(h)
        elif kind == LayerKind.FLATTEN:
            h = ops.flatten(h)
        else:
            h = ops.l2_normalize(h)
    return h
