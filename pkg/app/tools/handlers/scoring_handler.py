from app.config.settings import Settings
from app.core.workers import resolve_threads
from app.repositories.report_repository import ReportRepository
from app.services.embedding_service import EmbeddingService
from app.services.scoring_service import ScoringService
from app.tools.handlers.common import as_path, guarded


def create_scoring_handlers(
    scoring_service: ScoringService,
    embedding_service: EmbeddingService,
    reports: ReportRepository,
    settings: Settings,
):
    def score(arguments: dict):
        inputs = {key: as_path(arguments, key) for key in ("model", "pruned", "inputs")}
        outputs, summary = scoring_service.score(inputs["model"], inputs["pruned"], inputs["inputs"], as_path(arguments, "out"))
        return outputs, summary, {"threads": resolve_threads(settings.threads)}, inputs

    def embed(arguments: dict):
        inputs = {key: as_path(arguments, key) for key in ("model", "inputs")}
        outputs = embedding_service.embed(inputs["model"], inputs["inputs"], as_path(arguments, "out"))
        return outputs, {}, {"threads": resolve_threads(settings.threads)}, inputs

    return {
        "score": guarded("score", reports, settings.tool_version, score),
        "embed": guarded("embed", reports, settings.tool_version, embed),
    }
