"""Embedding drift between an original and a pruned model, and its quality score.

D(x) = ||e(x) - e_rho(x)||_2 with both embeddings unit-norm, so 0 <= D <= 2.
Q(x) = 1 - D(x) / 2 and D^2 = 2 - 2 cos(angle between the embeddings).
"""
from __future__ import annotations

from collections.abc import Sequence
import logging

import numpy as np

from app.core.errors import DimensionMismatch, DriftOutOfRange, EmptySampleSet, PrefiqsError
from app.core.types import ScoreRecord
from app.core.workers import ordered_map
from app.model.network import Model, forward


logger = logging.getLogger(__name__)

DRIFT_MAX = 2.0
DRIFT_TOLERANCE = 1e-6

Sample = tuple[str, np.ndarray]


def _clamp(value: float) -> tuple[float, bool]:
    if value < 0.0 or value > DRIFT_MAX + DRIFT_TOLERANCE or not np.isfinite(value):
        raise DriftOutOfRange(f"drift {value!r} outside [0, {DRIFT_MAX}]")
    if value > DRIFT_MAX:
        return DRIFT_MAX, True
    return value, False


def embedding_distance(a: np.ndarray, b: np.ndarray) -> float:
    if a.shape != b.shape:
        raise DimensionMismatch(f"embedding shapes {a.shape} and {b.shape} differ")
    diff = a.astype(np.float64) - b.astype(np.float64)
    return float(np.sqrt(np.einsum("i,i->", diff, diff)))


def _measure(original: Model, pruned: Model, x: np.ndarray) -> tuple[float, bool]:
    if original.d != pruned.d:
        raise DimensionMismatch(f"original d={original.d} but pruned d={pruned.d}")
    return _clamp(embedding_distance(forward(original, x), forward(pruned, x)))


def drift(original: Model, pruned: Model, x: np.ndarray) -> float:
    value, clamped = _measure(original, pruned, x)
    if clamped:
        logger.warning("Drift clamped to %s", DRIFT_MAX)
    return value


def quality(d: float) -> float:
    value, _ = _clamp(float(d))
    return 1.0 - value / 2.0


def angle_cosine_from_drift(d: float) -> float:
    value, _ = _clamp(float(d))
    return 1.0 - value * value / 2.0


def batch_score(
    original: Model,
    pruned: Model,
    samples: Sequence[Sample],
    rho: float = 0.0,
    criterion: str = "",
    granularity: str = "",
    threads: int | None = None,
) -> list[ScoreRecord]:
    """Score every sample; failures become error entries instead of aborting the batch."""
    if not samples:
        raise EmptySampleSet("batch_score needs at least one sample")

    def score_one(sample: Sample) -> ScoreRecord:
        sample_id, x = sample
        provenance = {"sample_id": sample_id, "rho": rho, "criterion": criterion, "granularity": granularity}
        try:
            value, clamped = _measure(original, pruned, x)
        except PrefiqsError as exc:
            return ScoreRecord(**provenance, error=f"{type(exc).__name__}: {exc}")
        return ScoreRecord(**provenance, drift=value, quality=1.0 - value / 2.0, clamped=clamped)

    records = ordered_map(score_one, samples, threads=threads)
    failed = sum(1 for r in records if not r.ok)
    clamped = sum(1 for r in records if r.clamped)
    if failed:
        logger.warning("Scoring finished with failures samples=%s failed=%s", len(records), failed)
    if clamped:
        logger.warning("Drift clamped samples=%s", clamped)
    logger.info("Scored samples=%s rho=%s criterion=%s granularity=%s", len(records), rho, criterion, granularity)
    return records
