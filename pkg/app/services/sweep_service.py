from __future__ import annotations

from collections.abc import Sequence
import logging
from pathlib import Path
from typing import Any

from app.pruning.masks import Criterion, Granularity
from app.repositories.artifact_repository import ArtifactRepository
from app.repositories.dataset_repository import DatasetRepository
from app.repositories.evaluation_repository import EvaluationRepository
from app.repositories.report_repository import ReportRepository
from app.services.embedding_service import EmbeddingService
from app.services.evaluation_service import EvaluationService
from app.services.pruning_service import PruningService
from app.services.scoring_service import ScoringService


logger = logging.getLogger(__name__)

SWEEP_FILE = "sweep.csv"
SWEEP_SUMMARY_FILE = "sweep.json"

STRATEGIES: tuple[tuple[Criterion, Granularity], ...] = (
    (Criterion.L1_MAGNITUDE, Granularity.UNSTRUCTURED),
    (Criterion.RANDOM, Granularity.UNSTRUCTURED),
    (Criterion.L1_MAGNITUDE, Granularity.STRUCTURED),
)


class SweepService:
    """Pruning strategy x ratio grid: drift-quality pAUC and verification accuracy of the pruned model."""

    def __init__(
        self,
        artifacts: ArtifactRepository,
        datasets: DatasetRepository,
        tables: EvaluationRepository,
        reports: ReportRepository,
        pruning_service: PruningService,
        scoring_service: ScoringService,
        embedding_service: EmbeddingService,
        evaluation_service: EvaluationService,
        random_seed: int = 1234,
    ):
        self.artifacts = artifacts
        self.datasets = datasets
        self.tables = tables
        self.reports = reports
        self.pruning_service = pruning_service
        self.scoring_service = scoring_service
        self.embedding_service = embedding_service
        self.evaluation_service = evaluation_service
        self.random_seed = random_seed

    def run(
        self,
        model_path: Path,
        inputs_path: Path,
        pairs_path: Path,
        ratios: Sequence[float],
        fmr: float,
        max_discard: float,
        out_dir: Path,
    ) -> tuple[dict[str, Path], dict[str, Any]]:
        out = Path(out_dir)
        model = self.artifacts.load_model(model_path)
        samples = self.datasets.load(inputs_path).samples()
        pairs = self.tables.load_pairs(pairs_path)
        reference = self.embedding_service.embed_samples(model, samples)
        baseline = self.evaluation_service.accuracy(reference, pairs)

        rows: list[dict[str, Any]] = []
        for criterion, granularity in STRATEGIES:
            seed = self.random_seed if criterion == Criterion.RANDOM else None
            for rho in ratios:
                pruned, _ = self.pruning_service.prune_model(model, rho, criterion, granularity, seed)
                records = self.scoring_service.score_samples(
                    model, pruned, samples, rho, criterion.value, granularity.value
                )
                qualities = {r.sample_id: r.quality for r in records if r.ok}
                area = self.evaluation_service.pauc_for_qualities(
                    reference, pairs, qualities, fmr, max_discard, quality_source=f"{criterion.value}/{granularity.value}"
                )
                accuracy = self.evaluation_service.accuracy(self.embedding_service.embed_samples(pruned, samples), pairs)
                rows.append(
                    {
                        "criterion": criterion.value,
                        "granularity": granularity.value,
                        "rho": float(rho),
                        "pauc_x1e3": area,
                        "accuracy": accuracy,
                    }
                )
                logger.info(
                    "Sweep criterion=%s granularity=%s rho=%s pauc_x1e3=%.4f accuracy=%.4f",
                    criterion.value, granularity.value, rho, area, accuracy,
                )

        summary = {
            "baseline_accuracy": baseline,
            "fmr": fmr,
            "max_discard": max_discard,
            "random_seed": self.random_seed,
            "rows": len(rows),
        }
        outputs = {
            "sweep": self.tables.save_sweep(out / SWEEP_FILE, rows),
            "summary": self.reports.save_report(out / SWEEP_SUMMARY_FILE, summary),
        }
        return outputs, summary
