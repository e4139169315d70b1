"""Synthetic identities with a known per-image degradation level."""
from __future__ import annotations

from collections.abc import Iterator, Mapping
import logging
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from app.core.errors import ConfigInvalid, ShapeMismatch
from app.evaluation.metrics import PairList
from app.tensor.rng import derive_rng


logger = logging.getLogger(__name__)


class SynthConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    n_identities: int = Field(ge=2)
    samples_per_identity: int = Field(ge=1)
    input_dim: int = Field(ge=1)
    embedding_dim: int = Field(ge=1)
    noise_levels: list[float] = Field(min_length=1)
    seed: int = Field(default=0, ge=0)

    @field_validator("noise_levels")
    @classmethod
    def _non_negative(cls, levels: list[float]) -> list[float]:
        if any(not np.isfinite(s) or s < 0 for s in levels):
            raise ValueError("noise levels must be finite and >= 0")
        return levels

    @classmethod
    def parse(cls, data: Mapping[str, Any]) -> "SynthConfig":
        try:
            return cls.model_validate(data)
        except ValidationError as exc:
            raise ConfigInvalid(f"invalid synth config: {exc.errors()[0]['msg']}") from exc


class SynthDataset(BaseModel):
    """Row ``i`` of ``inputs`` belongs to ``ids[i]``; ``sigmas`` is the ground-truth degradation."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    ids: tuple[str, ...]
    inputs: np.ndarray
    labels: np.ndarray
    sigmas: np.ndarray

    @model_validator(mode="after")
    def _check(self) -> "SynthDataset":
        n = len(self.ids)
        if self.inputs.ndim != 2 or self.inputs.shape[0] != n or self.labels.shape != (n,) or self.sigmas.shape != (n,):
            raise ShapeMismatch("dataset columns disagree on the number of samples")
        if len(set(self.ids)) != n:
            raise ShapeMismatch("sample ids must be unique")
        for array in (self.inputs, self.labels, self.sigmas):
            array.flags.writeable = False
        return self

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def input_dim(self) -> int:
        return int(self.inputs.shape[1])

    @property
    def n_identities(self) -> int:
        return int(np.unique(self.labels).size)

    def samples(self) -> list[tuple[str, np.ndarray]]:
        return list(zip(self.ids, self.inputs))

    def rows(self) -> Iterator[tuple[str, np.ndarray, int, float]]:
        for row, sample_id in enumerate(self.ids):
            yield sample_id, self.inputs[row], int(self.labels[row]), float(self.sigmas[row])


def sample_id(label: int, index: int) -> str:
    return f"id{label:03d}_{index:03d}"


def generate_dataset(cfg: SynthConfig) -> SynthDataset:
    """Centroids uniform on the unit sphere; sample = centroid + sigma * N(0, I)."""
    centroid_rng = derive_rng(cfg.seed, "centroids")
    raw = centroid_rng.standard_normal((cfg.n_identities, cfg.input_dim))
    norms = np.sqrt(np.einsum("ij,ij->i", raw, raw))[:, None]
    centroids = (raw / norms).astype(np.float32)

    n = cfg.n_identities * cfg.samples_per_identity
    noise = derive_rng(cfg.seed, "noise").standard_normal((n, cfg.input_dim))
    levels = np.asarray(cfg.noise_levels, dtype=np.float64)

    labels = np.repeat(np.arange(cfg.n_identities, dtype=np.int64), cfg.samples_per_identity)
    within = np.tile(np.arange(cfg.samples_per_identity), cfg.n_identities)
    sigmas = levels[within % levels.size]
    inputs = (centroids[labels].astype(np.float64) + sigmas[:, None] * noise).astype(np.float32)
    ids = tuple(sample_id(int(label), int(j)) for label, j in zip(labels, within))

    logger.info(
        "Generated dataset identities=%s samples=%s input_dim=%s seed=%s",
        cfg.n_identities, n, cfg.input_dim, cfg.seed,
    )
    return SynthDataset(ids=ids, inputs=inputs, labels=labels, sigmas=sigmas)


def build_pairs(dataset: SynthDataset, max_impostors: int, seed: int) -> PairList:
    """Every genuine pair plus at most ``max_impostors`` seeded impostor pairs.

    Pairs are listed in ascending (row_a, row_b) order with row_a < row_b.
    """
    if max_impostors < 0:
        raise ConfigInvalid("max_impostors must be >= 0")
    rows_a, rows_b = np.triu_indices(len(dataset), k=1)
    genuine = dataset.labels[rows_a] == dataset.labels[rows_b]

    impostor_at = np.flatnonzero(~genuine)
    if impostor_at.size > max_impostors:
        chosen = derive_rng(seed, "impostors").choice(impostor_at, size=max_impostors, replace=False)
        impostor_at = np.sort(chosen)
    keep = np.sort(np.concatenate([np.flatnonzero(genuine), impostor_at]))

    ids = dataset.ids
    pairs = PairList(
        id_a=tuple(ids[i] for i in rows_a[keep]),
        id_b=tuple(ids[j] for j in rows_b[keep]),
        genuine=genuine[keep],
    )
    logger.info(
        "Built pairs genuine=%s impostor=%s seed=%s",
        int(np.count_nonzero(pairs.genuine)), int(impostor_at.size), seed,
    )
    return pairs
