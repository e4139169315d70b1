from app.cli.gateway import CliGateway
from app.config.settings import Settings
from app.repositories.artifact_repository import ArtifactRepository
from app.repositories.dataset_repository import DatasetRepository
from app.repositories.evaluation_repository import EvaluationRepository
from app.repositories.report_repository import ReportRepository
from app.repositories.score_repository import ScoreRepository
from app.services.embedding_service import EmbeddingService
from app.services.evaluation_service import EvaluationService
from app.services.jvp_service import JvpService
from app.services.plot_service import PlotService
from app.services.pruning_service import PruningService
from app.services.scoring_service import ScoringService
from app.services.sweep_service import SweepService
from app.services.synth_service import SynthService
from app.tools.definitions import COMMAND_DEFINITIONS
from app.tools.handlers.evaluation_handler import create_evaluation_handlers
from app.tools.handlers.jvp_handler import create_jvp_handlers
from app.tools.handlers.pruning_handler import create_pruning_handlers
from app.tools.handlers.scoring_handler import create_scoring_handlers
from app.tools.handlers.synth_handler import create_synth_handlers
from app.tools.registry import CommandRegistry


class Container:
    def __init__(self, settings: Settings):
        self.settings = settings
        self.artifacts = ArtifactRepository()
        self.datasets = DatasetRepository()
        self.tables = EvaluationRepository()
        self.scores = ScoreRepository()
        self.reports = ReportRepository()

    def build_registry(self) -> CommandRegistry:
        settings = self.settings
        threads = settings.threads

        embedding_service = EmbeddingService(self.artifacts, self.datasets, self.tables, threads=threads)
        plot_service = PlotService()
        evaluation_service = EvaluationService(
            tables=self.tables,
            scores=self.scores,
            reports=self.reports,
            artifacts=self.artifacts,
            datasets=self.datasets,
            embedding_service=embedding_service,
            plot_service=plot_service,
            grid_max=settings.grid_max,
            auc_max_discard=settings.auc_max_discard,
        )
        synth_service = SynthService(self.datasets, self.artifacts, self.tables, self.reports)
        pruning_service = PruningService(self.artifacts)
        scoring_service = ScoringService(self.artifacts, self.datasets, self.scores, threads=threads)
        jvp_service = JvpService(
            artifacts=self.artifacts,
            datasets=self.datasets,
            scores=self.scores,
            tables=self.tables,
            reports=self.reports,
            embedding_service=embedding_service,
            evaluation_service=evaluation_service,
            halving_tolerance=settings.halving_tolerance,
            threads=threads,
        )
        sweep_service = SweepService(
            artifacts=self.artifacts,
            datasets=self.datasets,
            tables=self.tables,
            reports=self.reports,
            pruning_service=pruning_service,
            scoring_service=scoring_service,
            embedding_service=embedding_service,
            evaluation_service=evaluation_service,
            random_seed=settings.sweep_random_seed,
        )

        registry = CommandRegistry(definitions=COMMAND_DEFINITIONS)
        registry.register_handlers(create_synth_handlers(synth_service, self.reports, settings))
        registry.register_handlers(create_pruning_handlers(pruning_service, self.reports, settings))
        registry.register_handlers(create_scoring_handlers(scoring_service, embedding_service, self.reports, settings))
        registry.register_handlers(create_jvp_handlers(jvp_service, self.reports, settings))
        registry.register_handlers(
            create_evaluation_handlers(evaluation_service, sweep_service, self.reports, settings)
        )
        return registry.ensure_complete()

    def build_gateway(self) -> CliGateway:
        return CliGateway(self.build_registry())
