from app.config.settings import Settings
from app.repositories.report_repository import ReportRepository
from app.services.jvp_service import JvpService
from app.tools.handlers.common import as_float, as_fmr, as_path, as_positive, guarded


def create_jvp_handlers(service: JvpService, reports: ReportRepository, settings: Settings):
    def jvp(arguments: dict):
        model_path = as_path(arguments, "model")
        inputs_path = as_path(arguments, "inputs")
        pairs_path = as_path(arguments, "pairs", required=False)
        parameters = {
            "ratio": as_float(arguments, "ratio", settings.jvp_ratio),
            "step": as_positive(arguments, "step", settings.jvp_step),
            "criterion": "l1_magnitude",
            "halving_tolerance": settings.halving_tolerance,
            "fmr": as_fmr(arguments, settings.default_fmr),
            "max_discard": as_float(arguments, "max_discard", settings.pauc_max_discard),
        }
        outputs, summary = service.validate(
            model_path,
            parameters["ratio"],
            inputs_path,
            parameters["step"],
            as_path(arguments, "out"),
            pairs_path=pairs_path,
            fmr=parameters["fmr"],
            max_discard=parameters["max_discard"],
        )
        return outputs, summary, parameters, {"model": model_path, "inputs": inputs_path, "pairs": pairs_path}

    return {"jvp": guarded("jvp", reports, settings.tool_version, jvp)}
