from __future__ import annotations

from collections.abc import Mapping, Sequence
import hashlib
import logging
from pathlib import Path
from typing import Any

from app.core.errors import EmptyScores, GridTooShort
from app.core.types import EdcCurve, VerificationReport
from app.evaluation.edc import auc, default_grid, edc_curve, pauc, scaled
from app.evaluation.metrics import (
    EmbeddingSet,
    PairList,
    fnmr_at_threshold,
    pair_scores,
    threshold_at_fmr,
    verification_accuracy,
)
from app.repositories.artifact_repository import ArtifactRepository
from app.repositories.dataset_repository import DatasetRepository
from app.repositories.evaluation_repository import EvaluationRepository
from app.repositories.report_repository import ReportRepository
from app.repositories.score_repository import ScoreRepository
from app.services.embedding_service import EmbeddingService
from app.services.plot_service import PlotService


logger = logging.getLogger(__name__)

EDC_FILE = "edc.csv"
EDC_SIDECAR_FILE = "edc.json"
EDC_PLOT_FILE = "edc.svg"
VERIFY_FILE = "verify.json"
PAUC_CONVENTION = "raw trapezoid over [0, max_discard], not normalized, no baseline subtraction"


def file_digest(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class EvaluationService:
    def __init__(
        self,
        tables: EvaluationRepository,
        scores: ScoreRepository,
        reports: ReportRepository,
        artifacts: ArtifactRepository,
        datasets: DatasetRepository,
        embedding_service: EmbeddingService,
        plot_service: PlotService,
        grid_max: float = 0.95,
        auc_max_discard: float = 0.95,
    ):
        self.tables = tables
        self.scores = scores
        self.reports = reports
        self.artifacts = artifacts
        self.datasets = datasets
        self.embedding_service = embedding_service
        self.plot_service = plot_service
        self.grid_max = grid_max
        self.auc_max_discard = auc_max_discard

    def curve_areas(self, curve: EdcCurve, max_discard: float) -> tuple[float, float | None]:
        """(pAUC x 10^3, AUC x 10^3); AUC is None when the grid stops short of its range."""
        partial = scaled(pauc(curve, max_discard))
        try:
            full = scaled(auc(curve, self.auc_max_discard))
        except GridTooShort:
            logger.info("AUC skipped: grid ends at %s < %s", curve.discard_fractions[-1], self.auc_max_discard)
            full = None
        return partial, full

    def pauc_for_qualities(
        self,
        embeddings: EmbeddingSet,
        pairs: PairList,
        qualities: Mapping[str, float],
        fmr: float,
        max_discard: float,
        grid: Sequence[float] | None = None,
        quality_source: str = "",
    ) -> float:
        curve = edc_curve(embeddings, pairs, qualities, fmr, grid or default_grid(maximum=self.grid_max), quality_source)
        return scaled(pauc(curve, max_discard))

    def edc(
        self,
        embeddings_path: Path,
        pairs_path: Path,
        scores_path: Path,
        fmr: float,
        grid_step: float,
        max_discard: float,
        out_dir: Path,
        grid_max: float | None = None,
        plot: bool = True,
    ) -> tuple[dict[str, Path], dict[str, Any]]:
        out = Path(out_dir)
        embeddings = self.tables.load_embeddings(embeddings_path)
        pairs = self.tables.load_pairs(pairs_path)
        qualities = self.scores.load_qualities(scores_path)
        grid = default_grid(grid_step, self.grid_max if grid_max is None else grid_max)

        curve = edc_curve(embeddings, pairs, qualities, fmr, grid, quality_source=Path(scores_path).name)
        partial, full = self.curve_areas(curve, max_discard)
        sidecar = {
            "fmr_target": fmr,
            "threshold": curve.threshold,
            "achieved_fmr": curve.achieved_fmr,
            "max_discard": max_discard,
            "pauc_x1e3": partial,
            "auc_x1e3": full,
            "convention": PAUC_CONVENTION,
            "insufficient_impostors": curve.insufficient_impostors,
            "carried_forward": [p.discard_fraction for p in curve.points if p.carried_forward],
            "provenance": {
                "embeddings_sha256": file_digest(embeddings_path),
                "pairs_sha256": file_digest(pairs_path),
                "scores_sha256": file_digest(scores_path),
            },
        }
        outputs = {
            "edc": self.tables.save_edc(out / EDC_FILE, curve),
            "sidecar": self.reports.save_report(out / EDC_SIDECAR_FILE, sidecar),
        }
        if plot:
            outputs["plot"] = self.plot_service.draw_edc([(Path(scores_path).stem, curve)], out / EDC_PLOT_FILE)
        logger.info("EDC written fmr=%s pauc_x1e3=%.6f auc_x1e3=%s", fmr, partial, full)
        return outputs, {"pauc_x1e3": partial, "auc_x1e3": full, "threshold": curve.threshold}

    def verification_report(self, embeddings: EmbeddingSet, pairs: PairList, fmrs: Sequence[float]) -> VerificationReport:
        scores = pair_scores(embeddings, pairs)
        genuine = scores[pairs.genuine]
        impostor = scores[~pairs.genuine]
        if genuine.size == 0 or impostor.size == 0:
            raise EmptyScores("verification needs both genuine and impostor pairs")
        accuracy, threshold = verification_accuracy(genuine, impostor)

        fnmr_at: dict[str, float] = {}
        threshold_at: dict[str, float] = {}
        insufficient: list[str] = []
        for fmr in fmrs:
            key = format(fmr, "g")
            operating = threshold_at_fmr(impostor, fmr)
            threshold_at[key] = operating.threshold
            fnmr_at[key] = fnmr_at_threshold(genuine, operating.threshold)
            if operating.insufficient_impostors:
                insufficient.append(key)
        return VerificationReport(
            accuracy=accuracy,
            best_threshold=threshold,
            n_genuine=int(genuine.size),
            n_impostor=int(impostor.size),
            fnmr_at_fmr=fnmr_at,
            threshold_at_fmr=threshold_at,
            insufficient_impostors=insufficient,
        )

    def accuracy(self, embeddings: EmbeddingSet, pairs: PairList) -> float:
        scores = pair_scores(embeddings, pairs)
        return verification_accuracy(scores[pairs.genuine], scores[~pairs.genuine])[0]

    def verify(
        self,
        model_path: Path,
        inputs_path: Path,
        pairs_path: Path,
        fmrs: Sequence[float],
        out_dir: Path,
    ) -> tuple[dict[str, Path], dict[str, Any]]:
        model = self.artifacts.load_model(model_path)
        dataset = self.datasets.load(inputs_path)
        pairs = self.tables.load_pairs(pairs_path)
        embeddings = self.embedding_service.embed_samples(model, dataset.samples())
        report = self.verification_report(embeddings, pairs, fmrs)
        output = self.reports.save_report(Path(out_dir) / VERIFY_FILE, report)
        logger.info(
            "Verification accuracy=%.4f threshold=%.6f genuine=%s impostor=%s",
            report.accuracy, report.best_threshold, report.n_genuine, report.n_impostor,
        )
        return {"report": output}, {"accuracy": report.accuracy, "fnmr_at_fmr": report.fnmr_at_fmr}
