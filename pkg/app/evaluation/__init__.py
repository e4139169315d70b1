"""Verification metrics and quality-driven discard curves."""
from app.evaluation.edc import auc, default_grid, discard_order, edc_curve, pauc, scaled
from app.evaluation.metrics import (
    EmbeddingSet,
    PairList,
    allowed_false_matches,
    cosine_similarity,
    fnmr_at_threshold,
    pair_scores,
    threshold_at_fmr,
    verification_accuracy,
)

__all__ = [
    "EmbeddingSet",
    "PairList",
    "allowed_false_matches",
    "auc",
    "cosine_similarity",
    "default_grid",
    "discard_order",
    "edc_curve",
    "fnmr_at_threshold",
    "pair_scores",
    "pauc",
    "scaled",
    "threshold_at_fmr",
    "verification_accuracy",
]
