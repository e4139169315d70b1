"""File-backed artifact repositories."""
from app.repositories.artifact_repository import ArtifactRepository
from app.repositories.dataset_repository import DatasetRepository
from app.repositories.evaluation_repository import EvaluationRepository
from app.repositories.report_repository import ReportRepository
from app.repositories.score_repository import ScoreRepository

__all__ = [
    "ArtifactRepository",
    "DatasetRepository",
    "EvaluationRepository",
    "ReportRepository",
    "ScoreRepository",
]
