from app.config.settings import Settings
from app.core.errors import UsageError
from app.pruning.masks import Criterion, Granularity
from app.repositories.report_repository import ReportRepository
from app.services.pruning_service import PruningService
from app.tools.handlers.common import as_float, as_path, as_seed, guarded

CRITERIA = {"l1": Criterion.L1_MAGNITUDE, "random": Criterion.RANDOM}


def create_pruning_handlers(service: PruningService, reports: ReportRepository, settings: Settings):
    def prune(arguments: dict):
        model_path = as_path(arguments, "model")
        rho = as_float(arguments, "ratio")
        name = str(arguments.get("criterion") or "l1")
        if name not in CRITERIA:
            raise UsageError(f"unknown criterion {name!r}; choose l1 or random")
        try:
            granularity = Granularity(str(arguments.get("granularity") or "unstructured"))
        except ValueError as exc:
            raise UsageError(f"unknown granularity {arguments.get('granularity')!r}") from exc
        seed = as_seed(arguments)

        outputs, summary = service.prune(model_path, rho, CRITERIA[name], granularity, seed, as_path(arguments, "out"))
        parameters = {"ratio": rho, "criterion": CRITERIA[name].value, "granularity": granularity.value, "seed": seed}
        return outputs, summary, parameters, {"model": model_path}

    return {"prune": guarded("prune", reports, settings.tool_version, prune)}
