from app.config.settings import Settings
from app.core.errors import UsageError
from app.evaluation.metrics import check_fmr
from app.repositories.report_repository import ReportRepository
from app.services.evaluation_service import EvaluationService
from app.services.sweep_service import SweepService
from app.tools.handlers.common import as_float, as_fmr, as_path, as_positive, guarded


def create_evaluation_handlers(
    evaluation_service: EvaluationService,
    sweep_service: SweepService,
    reports: ReportRepository,
    settings: Settings,
):
    def parse_numbers(values, default: list[float], flag: str) -> list[float]:
        if values is None:
            return list(default)
        if not isinstance(values, (list, tuple)):
            values = [values]
        try:
            parsed = [float(v) for v in values]
        except (TypeError, ValueError) as exc:
            raise UsageError(f"--{flag} expects numbers") from exc
        if not parsed:
            raise UsageError(f"--{flag} needs at least one value")
        return parsed

    def edc(arguments: dict):
        inputs = {key: as_path(arguments, key) for key in ("embeddings", "pairs", "scores")}
        parameters = {
            "fmr": as_fmr(arguments, settings.default_fmr),
            "grid_step": as_positive(arguments, "grid_step", settings.grid_step),
            "grid_max": as_float(arguments, "grid_max", settings.grid_max),
            "max_discard": as_float(arguments, "max_discard", settings.pauc_max_discard),
            "plot": settings.plot_edc and not arguments.get("no_plot", False),
        }
        if not 0.0 < parameters["grid_step"] < 1.0:
            raise UsageError("--grid-step must lie in (0, 1)")
        outputs, summary = evaluation_service.edc(
            inputs["embeddings"],
            inputs["pairs"],
            inputs["scores"],
            fmr=parameters["fmr"],
            grid_step=parameters["grid_step"],
            max_discard=parameters["max_discard"],
            out_dir=as_path(arguments, "out"),
            grid_max=parameters["grid_max"],
            plot=parameters["plot"],
        )
        return outputs, summary, parameters, inputs

    def verify(arguments: dict):
        inputs = {key: as_path(arguments, key) for key in ("model", "inputs", "pairs")}
        fmrs = [check_fmr(v) for v in parse_numbers(arguments.get("fmr"), [settings.default_fmr], "fmr")]
        outputs, summary = evaluation_service.verify(
            inputs["model"], inputs["inputs"], inputs["pairs"], fmrs, as_path(arguments, "out")
        )
        return outputs, summary, {"fmr": fmrs}, inputs

    def sweep(arguments: dict):
        inputs = {key: as_path(arguments, key) for key in ("model", "inputs", "pairs")}
        parameters = {
            "ratios": parse_numbers(arguments.get("ratios"), settings.sweep_ratios, "ratios"),
            "fmr": as_fmr(arguments, settings.default_fmr),
            "max_discard": as_float(arguments, "max_discard", settings.pauc_max_discard),
            "random_seed": settings.sweep_random_seed,
        }
        outputs, summary = sweep_service.run(
            inputs["model"],
            inputs["inputs"],
            inputs["pairs"],
            parameters["ratios"],
            parameters["fmr"],
            parameters["max_discard"],
            as_path(arguments, "out"),
        )
        return outputs, summary, parameters, inputs

    return {
        "edc": guarded("edc", reports, settings.tool_version, edc),
        "verify": guarded("verify", reports, settings.tool_version, verify),
        "sweep": guarded("sweep", reports, settings.tool_version, sweep),
    }
