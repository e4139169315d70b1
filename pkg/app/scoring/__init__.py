"""Pruning-induced drift and the quality score derived from it."""
from app.scoring.drift import angle_cosine_from_drift, batch_score, drift, embedding_distance, quality

__all__ = ["angle_cosine_from_drift", "batch_score", "drift", "embedding_distance", "quality"]
