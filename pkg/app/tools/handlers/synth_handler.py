from app.config.settings import Settings
from app.repositories.report_repository import ReportRepository
from app.services.synth_service import SynthService
from app.tools.handlers.common import as_path, as_seed, guarded


def create_synth_handlers(service: SynthService, reports: ReportRepository, settings: Settings):
    def synth(arguments: dict):
        config_path = as_path(arguments, "config")
        seed = as_seed(arguments)
        config = service.load_config(config_path, seed)
        outputs, summary = service.run(config, as_path(arguments, "out"))
        parameters = {"config": config.model_dump(mode="json"), "seed": seed}
        compact = {k: v for k, v in summary.items() if k != "epoch_losses"}
        return outputs, compact, parameters, {"config": config_path}

    return {"synth": guarded("synth", reports, settings.tool_version, synth)}
