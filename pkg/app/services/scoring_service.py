from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

from app.core.errors import DimensionMismatch
from app.core.types import ScoreRecord
from app.model.network import Model
from app.repositories.artifact_repository import ArtifactRepository
from app.repositories.dataset_repository import DatasetRepository
from app.repositories.score_repository import ScoreRepository
from app.scoring.drift import Sample, batch_score


logger = logging.getLogger(__name__)

SCORES_FILE = "scores.csv"
FAILURES_FILE = "score_failures.csv"


class ScoringService:
    def __init__(
        self,
        artifacts: ArtifactRepository,
        datasets: DatasetRepository,
        scores: ScoreRepository,
        threads: int | None = None,
    ):
        self.artifacts = artifacts
        self.datasets = datasets
        self.scores = scores
        self.threads = threads

    def score_samples(
        self,
        original: Model,
        pruned: Model,
        samples: list[Sample],
        rho: float = 0.0,
        criterion: str = "",
        granularity: str = "",
    ) -> list[ScoreRecord]:
        if original.d != pruned.d:
            raise DimensionMismatch(f"embedding dimensions differ: original d={original.d}, pruned d={pruned.d}")
        return batch_score(original, pruned, samples, rho, criterion, granularity, threads=self.threads)

    def score(self, model_path: Path, pruned_path: Path, inputs_path: Path, out_dir: Path) -> tuple[dict[str, Path], dict[str, Any]]:
        original = self.artifacts.load_model(model_path)
        pruned = self.artifacts.load_model(pruned_path)
        dataset = self.datasets.load(inputs_path)
        records = self.score_samples(original, pruned, dataset.samples())
        outputs = {"scores": self.scores.save_scores(Path(out_dir) / SCORES_FILE, records)}
        failed = sum(1 for r in records if not r.ok)
        if failed:
            outputs["failures"] = self.scores.save_failures(Path(out_dir) / FAILURES_FILE, records)
        return outputs, {"n_samples": len(records), "failed": failed}
