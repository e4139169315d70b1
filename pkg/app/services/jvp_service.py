from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

from app.core.types import ValidationReport
from app.jvp.directional import validate_first_order
from app.pruning.masks import Criterion, build_mask
from app.repositories.artifact_repository import ArtifactRepository
from app.repositories.dataset_repository import DatasetRepository
from app.repositories.evaluation_repository import EvaluationRepository
from app.repositories.report_repository import ReportRepository
from app.repositories.score_repository import ScoreRepository
from app.services.embedding_service import EmbeddingService
from app.services.evaluation_service import EvaluationService


logger = logging.getLogger(__name__)

JVP_FILE = "jvp.csv"
JVP_REPORT_FILE = "jvp_report.json"


class JvpService:
    """Checks the drift against its first-order estimate under global L1 pruning."""

    def __init__(
        self,
        artifacts: ArtifactRepository,
        datasets: DatasetRepository,
        scores: ScoreRepository,
        tables: EvaluationRepository,
        reports: ReportRepository,
        embedding_service: EmbeddingService,
        evaluation_service: EvaluationService,
        halving_tolerance: float = 1e-3,
        threads: int | None = None,
    ):
        self.artifacts = artifacts
        self.datasets = datasets
        self.scores = scores
        self.tables = tables
        self.reports = reports
        self.embedding_service = embedding_service
        self.evaluation_service = evaluation_service
        self.halving_tolerance = halving_tolerance
        self.threads = threads

    def compare_pauc(
        self,
        report: ValidationReport,
        model_path: Path,
        inputs_path: Path,
        pairs_path: Path,
        fmr: float,
        max_discard: float,
    ) -> ValidationReport:
        """EDC pAUC with drift-derived quality next to the same with -jvp_norm as quality."""
        model = self.artifacts.load_model(model_path)
        dataset = self.datasets.load(inputs_path)
        pairs = self.tables.load_pairs(pairs_path)
        embeddings = self.embedding_service.embed_samples(model, dataset.samples())

        drift_quality = {r.sample_id: 1.0 - r.empirical_drift / 2.0 for r in report.records}
        jvp_quality = {r.sample_id: -r.jvp_norm for r in report.records}
        evaluate = self.evaluation_service.pauc_for_qualities
        drift_pauc = evaluate(embeddings, pairs, drift_quality, fmr, max_discard, quality_source="drift")
        jvp_pauc = evaluate(embeddings, pairs, jvp_quality, fmr, max_discard, quality_source="jvp")
        logger.info("pAUC comparison drift_x1e3=%.6f jvp_x1e3=%.6f fmr=%s", drift_pauc, jvp_pauc, fmr)
        return report.model_copy(update={"pauc_drift_x1e3": drift_pauc, "pauc_jvp_x1e3": jvp_pauc})

    def validate(
        self,
        model_path: Path,
        rho: float,
        inputs_path: Path,
        step: float,
        out_dir: Path,
        pairs_path: Path | None = None,
        fmr: float = 1e-2,
        max_discard: float = 0.3,
    ) -> tuple[dict[str, Path], dict[str, Any]]:
        out = Path(out_dir)
        model = self.artifacts.load_model(model_path)
        dataset = self.datasets.load(inputs_path)
        mask = build_mask(model, rho, Criterion.L1_MAGNITUDE)

        report = validate_first_order(
            model, mask, dataset.samples(), step=step, halving_tolerance=self.halving_tolerance, threads=self.threads
        )
        if pairs_path is not None:
            report = self.compare_pauc(report, model_path, inputs_path, pairs_path, fmr, max_discard)

        summary = report.model_dump(exclude={"records"})
        outputs = {
            "jvp": self.scores.save_jvp(out / JVP_FILE, report.records),
            "report": self.reports.save_report(out / JVP_REPORT_FILE, summary),
        }
        return outputs, summary
