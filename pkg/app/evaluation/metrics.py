"""Verification scores and operating points.

Match rule: a comparison is accepted when its cosine similarity is >= the
threshold. The +inf sentinel rejects everything.
"""
from __future__ import annotations

from collections.abc import Sequence
import logging
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from app.core.errors import DimensionMismatch, EmptyGenuine, EmptyScores, MissingEmbedding, ShapeMismatch, UsageError
from app.core.types import ThresholdResult


logger = logging.getLogger(__name__)

UNIT_TOLERANCE = 1e-5
REJECT_ALL = math.inf


class EmbeddingSet(BaseModel):
    """Unit embeddings keyed by image id; rows of ``matrix`` follow ``ids``."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    ids: tuple[str, ...]
    matrix: np.ndarray

    @model_validator(mode="after")
    def _check(self) -> "EmbeddingSet":
        if self.matrix.ndim != 2 or self.matrix.shape[0] != len(self.ids):
            raise ShapeMismatch(f"{len(self.ids)} ids for an embedding matrix of shape {self.matrix.shape}")
        if len(set(self.ids)) != len(self.ids):
            raise ShapeMismatch("embedding ids must be unique")
        wide = self.matrix.astype(np.float64)
        norms = np.sqrt(np.einsum("ij,ij->i", wide, wide))
        off = np.flatnonzero(np.abs(norms - 1.0) > UNIT_TOLERANCE)
        if off.size:
            raise ShapeMismatch(f"embedding {self.ids[off[0]]!r} has norm {norms[off[0]]:.6f}, expected unit norm")
        self.matrix.flags.writeable = False
        return self

    @classmethod
    def from_mapping(cls, embeddings: dict[str, np.ndarray]) -> "EmbeddingSet":
        ids = tuple(embeddings)
        return cls(ids=ids, matrix=np.stack([np.asarray(embeddings[i], dtype=np.float32) for i in ids]))

    @property
    def d(self) -> int:
        return int(self.matrix.shape[1])

    def rows(self, ids: Sequence[str]) -> np.ndarray:
        index = {sample_id: row for row, sample_id in enumerate(self.ids)}
        try:
            return np.array([index[i] for i in ids], dtype=np.int64)
        except KeyError as exc:
            raise MissingEmbedding(f"no embedding for image {exc.args[0]!r}") from exc


class PairList(BaseModel):
    """Comparison pairs; ``scores`` holds precomputed similarities when the list came with them."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    id_a: tuple[str, ...]
    id_b: tuple[str, ...]
    genuine: np.ndarray
    scores: np.ndarray | None = None

    @model_validator(mode="after")
    def _check(self) -> "PairList":
        if not (len(self.id_a) == len(self.id_b) == self.genuine.shape[0]):
            raise ShapeMismatch("pair columns have different lengths")
        if self.scores is not None and self.scores.shape != self.genuine.shape:
            raise ShapeMismatch("pair scores do not match the pair count")
        return self

    @classmethod
    def from_rows(cls, rows: Sequence[tuple]) -> "PairList":
        """Rows of (id_a, id_b, genuine) or (id_a, id_b, genuine, score)."""
        scored = bool(rows) and all(len(r) > 3 for r in rows)
        return cls(
            id_a=tuple(r[0] for r in rows),
            id_b=tuple(r[1] for r in rows),
            genuine=np.array([bool(r[2]) for r in rows], dtype=bool),
            scores=np.array([float(r[3]) for r in rows], dtype=np.float64) if scored else None,
        )

    def __len__(self) -> int:
        return len(self.id_a)

    def image_ids(self) -> list[str]:
        return sorted(set(self.id_a) | set(self.id_b))


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    if a.shape != b.shape or a.ndim != 1:
        raise DimensionMismatch(f"embedding shapes {a.shape} and {b.shape} differ")
    return float(np.einsum("i,i->", a.astype(np.float64), b.astype(np.float64)))


def pair_scores(embeddings: EmbeddingSet, pairs: PairList) -> np.ndarray:
    """Cosine similarity of every pair, in pair order."""
    if not len(pairs):
        return np.zeros(0, dtype=np.float64)
    wide = embeddings.matrix.astype(np.float64)
    left = wide[embeddings.rows(pairs.id_a)]
    right = wide[embeddings.rows(pairs.id_b)]
    return np.einsum("ij,ij->i", left, right)


def check_fmr(fmr: float) -> float:
    value = float(fmr)
    if not 0.0 < value <= 1.0:
        raise UsageError(f"fmr must lie in (0, 1], got {fmr}")
    return value


def allowed_false_matches(fmr: float, n: int) -> int:
    return int(math.floor(fmr * n + 1e-9))


def threshold_at_fmr(impostor_scores: Sequence[float] | np.ndarray, fmr: float) -> ThresholdResult:
    """Smallest candidate threshold whose false-match count stays within floor(fmr * n)."""
    fmr = check_fmr(fmr)
    scores = np.sort(np.asarray(impostor_scores, dtype=np.float64))
    n = int(scores.size)
    if n == 0:
        raise EmptyScores("threshold_at_fmr needs impostor scores")
    k = allowed_false_matches(fmr, n)

    candidates = np.unique(scores)
    accepted = n - np.searchsorted(scores, candidates, side="left")
    within = np.flatnonzero(accepted <= k)
    threshold = float(candidates[within[0]]) if within.size else REJECT_ALL
    false_matches = int(n - np.searchsorted(scores, threshold, side="left"))

    insufficient = k == 0
    if insufficient:
        logger.warning("Insufficient impostors for fmr=%s n=%s; every comparison is rejected", fmr, n)
    return ThresholdResult(
        threshold=threshold,
        achieved_fmr=false_matches / n,
        allowed_false_matches=k,
        n_impostors=n,
        insufficient_impostors=insufficient,
    )


def fnmr_at_threshold(genuine_scores: Sequence[float] | np.ndarray, tau: float) -> float:
    scores = np.asarray(genuine_scores, dtype=np.float64)
    if scores.size == 0:
        raise EmptyGenuine("fnmr_at_threshold needs genuine scores")
    return int(np.count_nonzero(scores < tau)) / int(scores.size)


def verification_accuracy(
    genuine_scores: Sequence[float] | np.ndarray,
    impostor_scores: Sequence[float] | np.ndarray,
) -> tuple[float, float]:
    """Best (accuracy, threshold) over midpoints between distinct scores and +/-inf.

    Accuracy ties go to the threshold farthest from its nearest score, then to
    the lowest threshold.
    """
    genuine = np.sort(np.asarray(genuine_scores, dtype=np.float64))
    impostor = np.sort(np.asarray(impostor_scores, dtype=np.float64))
    if genuine.size == 0 or impostor.size == 0:
        raise EmptyScores("verification_accuracy needs genuine and impostor scores")

    distinct = np.unique(np.concatenate([genuine, impostor]))
    midpoints = (distinct[:-1] + distinct[1:]) / 2.0
    candidates = np.concatenate([[-math.inf], midpoints, [math.inf]])
    margins = np.concatenate([[math.inf], (distinct[1:] - distinct[:-1]) / 2.0, [math.inf]])

    true_accepts = genuine.size - np.searchsorted(genuine, candidates, side="left")
    true_rejects = np.searchsorted(impostor, candidates, side="left")
    correct = true_accepts + true_rejects
    best = np.flatnonzero(correct == correct.max())
    chosen = best[np.argmax(margins[best])]
    total = genuine.size + impostor.size
    return int(correct[chosen]) / total, float(candidates[chosen])
