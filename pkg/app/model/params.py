"""Canonical flat view over the prunable parameters of a model.

Order: prunable layers in declaration order; within a layer the weight
tensor (row-major) and then the bias. BatchNorm statistics are not part of
the view.
"""
from __future__ import annotations

from typing import NamedTuple, Protocol

import numpy as np

from app.core.errors import LengthMismatch
from app.model.network import Model


class ParamSlot(NamedTuple):
    layer: int
    tensor: int
    offset: int
    size: int
    shape: tuple[int, ...]


class ParamView(NamedTuple):
    values: np.ndarray
    slots: tuple[ParamSlot, ...]

    def __len__(self) -> int:
        return int(self.values.shape[0])

    def locate(self, flat_index: int) -> tuple[int, int, int]:
        """Map a flat index to (layer, tensor, offset within the tensor)."""
        for slot in self.slots:
            if slot.offset <= flat_index < slot.offset + slot.size:
                return slot.layer, slot.tensor, flat_index - slot.offset
        raise IndexError(f"flat index {flat_index} outside view of length {len(self)}")


class HasBits(Protocol):
    bits: np.ndarray


def param_slots(model: Model) -> tuple[ParamSlot, ...]:
    slots = []
    offset = 0
    for layer_index, (layer, group) in enumerate(zip(model.layers, model.params)):
        if not layer.prunable:
            continue
        for tensor_index, tensor in enumerate(group):
            slots.append(ParamSlot(layer_index, tensor_index, offset, tensor.size, tensor.shape))
            offset += tensor.size
    return tuple(slots)


def param_vector_view(model: Model) -> ParamView:
    slots = param_slots(model)
    if not slots:
        return ParamView(np.zeros(0, dtype=model.dtype), slots)
    values = np.concatenate([model.params[s.layer][s.tensor].reshape(-1) for s in slots])
    values.flags.writeable = False
    return ParamView(values, slots)


def scatter(model: Model, values: np.ndarray) -> Model:
    """Return a copy of ``model`` whose prunable parameters are ``values``.

    Non-prunable tensors are carried verbatim; the new model takes the dtype of
    ``values`` when it is wider than the model's.
    """
    slots = param_slots(model)
    total = sum(s.size for s in slots)
    values = np.asarray(values)
    if values.shape != (total,):
        raise LengthMismatch(f"flat vector has shape {values.shape}, model has {total} prunable parameters")
    dtype = np.result_type(values, model.dtype)
    groups = [[t.astype(dtype) for t in group] for group in model.params]
    for slot in slots:
        groups[slot.layer][slot.tensor] = values[slot.offset : slot.offset + slot.size].astype(dtype).reshape(slot.shape)
    return model.replace_params(groups)


def mask_bits(mask: HasBits | np.ndarray) -> np.ndarray:
    return np.asarray(getattr(mask, "bits", mask)).astype(bool)


def apply_mask(model: Model, mask: HasBits | np.ndarray) -> Model:
    """theta_rho = m * theta; kept parameters are copied bit-exactly, pruned ones become +0.0."""
    bits = mask_bits(mask)
    view = param_vector_view(model)
    if bits.shape != (len(view),):
        raise LengthMismatch(f"mask length {bits.shape[0] if bits.ndim else 0} != N={len(view)}")
    return scatter(model, np.where(bits, view.values, np.zeros((), dtype=view.values.dtype)))
