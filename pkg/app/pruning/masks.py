from __future__ import annotations

try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        __str__ = str.__str__
        __format__ = str.__format__
import logging
import math
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from app.core.errors import LengthMismatch, RhoOutOfRange, UsageError
from app.model.network import Model
from app.model.params import param_vector_view
from app.tensor.rng import make_rng


logger = logging.getLogger(__name__)


class Criterion(StrEnum):
    L1_MAGNITUDE = "l1_magnitude"
    RANDOM = "random"


class Granularity(StrEnum):
    UNSTRUCTURED = "unstructured"
    STRUCTURED = "structured"


class PruneMask(BaseModel):
    """Binary keep-mask over the flat parameter view (1 = keep, 0 = pruned)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    bits: np.ndarray
    rho: float
    criterion: Criterion
    granularity: Granularity = Granularity.UNSTRUCTURED
    seed: int | None = None
    tau: float | None = None

    @model_validator(mode="before")
    @classmethod
    def _freeze_bits(cls, data: Any) -> Any:
        if isinstance(data, dict) and "bits" in data:
            bits = np.array(data["bits"], dtype=np.uint8, copy=True).reshape(-1)
            if np.any(bits > 1):
                raise ValueError("mask bits must be 0 or 1")
            bits.flags.writeable = False
            data = {**data, "bits": bits}
        return data

    @property
    def n(self) -> int:
        return int(self.bits.shape[0])

    def count_zeros(self) -> int:
        return int(self.n - np.count_nonzero(self.bits))


def check_rho(rho: float) -> float:
    rho = float(rho)
    if not 0.0 < rho < 1.0:
        raise RhoOutOfRange(f"rho={rho} must lie strictly between 0 and 1")
    return rho


def prune_count(rho: float, n: int) -> int:
    """k(rho, N): round half-up of rho * N."""
    return min(n, int(math.floor(rho * n + 0.5)))


def select_smallest_magnitudes(values: np.ndarray, k: int) -> tuple[np.ndarray, float | None]:
    """Flat indices of the k smallest |values|, ties by ascending index, and the largest pruned magnitude."""
    magnitudes = np.abs(values.astype(np.float64))
    order = np.argsort(magnitudes, kind="stable")
    pruned = order[:k]
    tau = float(magnitudes[pruned[-1]]) if k > 0 else None
    return pruned, tau


def build_mask_l1_global(model: Model, rho: float) -> PruneMask:
    rho = check_rho(rho)
    view = param_vector_view(model)
    k = prune_count(rho, len(view))
    pruned, tau = select_smallest_magnitudes(view.values, k)
    bits = np.ones(len(view), dtype=np.uint8)
    bits[pruned] = 0
    logger.debug("L1 mask built n=%s rho=%s k=%s tau=%s", len(view), rho, k, tau)
    return PruneMask(bits=bits, rho=rho, criterion=Criterion.L1_MAGNITUDE, tau=tau)


def partial_fisher_yates(n: int, k: int, seed: int) -> np.ndarray:
    """First k positions of a seeded Fisher-Yates shuffle of range(n)."""
    rng = make_rng(seed)
    indices = np.arange(n)
    for i in range(k):
        j = int(rng.integers(i, n))
        indices[i], indices[j] = indices[j], indices[i]
    return indices[:k]


def build_mask_random(model: Model, rho: float, seed: int) -> PruneMask:
    rho = check_rho(rho)
    n = model.n_prunable
    k = prune_count(rho, n)
    bits = np.ones(n, dtype=np.uint8)
    bits[partial_fisher_yates(n, k, seed)] = 0
    logger.debug("Random mask built n=%s rho=%s k=%s seed=%s", n, rho, k, seed)
    return PruneMask(bits=bits, rho=rho, criterion=Criterion.RANDOM, seed=int(seed))


def build_mask(model: Model, rho: float, criterion: Criterion, seed: int | None = None) -> PruneMask:
    if criterion == Criterion.RANDOM:
        if seed is None:
            raise UsageError("random pruning requires a seed")
        return build_mask_random(model, rho, seed)
    return build_mask_l1_global(model, rho)


def identity_mask(model: Model) -> PruneMask:
    """All-ones mask; pruning with it leaves the model unchanged."""
    return PruneMask(bits=np.ones(model.n_prunable, dtype=np.uint8), rho=0.0, criterion=Criterion.L1_MAGNITUDE)


def sparsity(mask: PruneMask) -> float:
    if mask.n == 0:
        return 0.0
    return mask.count_zeros() / mask.n


def check_mask_length(mask: PruneMask, model: Model) -> None:
    if mask.n != model.n_prunable:
        raise LengthMismatch(f"mask length {mask.n} != N={model.n_prunable}")
