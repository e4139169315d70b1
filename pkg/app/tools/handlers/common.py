from __future__ import annotations

from collections.abc import Callable
import logging
from pathlib import Path
import time
from typing import Any

from app.core.errors import EXIT_IO, PrefiqsError, UsageError
from app.core.types import CommandResult, RunManifest
from app.evaluation.metrics import check_fmr
from app.repositories.files import to_document
from app.repositories.report_repository import ReportRepository
from app.tensor.rng import check_seed


logger = logging.getLogger(__name__)

Body = Callable[[dict[str, Any]], tuple[dict[str, Path], dict[str, Any], dict[str, Any], dict[str, Any]]]


def require(arguments: dict[str, Any], key: str) -> Any:
    value = arguments.get(key)
    if value is None or value == "":
        raise UsageError(f"--{key.replace('_', '-')} is required")
    return value


def as_path(arguments: dict[str, Any], key: str, required: bool = True) -> Path | None:
    value = require(arguments, key) if required else arguments.get(key)
    return Path(value) if value not in (None, "") else None


def as_float(arguments: dict[str, Any], key: str, default: float | None = None) -> float:
    value = arguments.get(key)
    if value is None:
        if default is None:
            raise UsageError(f"--{key.replace('_', '-')} is required")
        return float(default)
    try:
        return float(value)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"--{key.replace('_', '-')} expects a number, got {value!r}") from exc


def as_seed(arguments: dict[str, Any], key: str = "seed") -> int | None:
    value = arguments.get(key)
    if value is None:
        return None
    try:
        return check_seed(int(value))
    except (TypeError, ValueError) as exc:
        raise UsageError(f"--{key} expects a non-negative integer, got {value!r}") from exc


def as_fmr(arguments: dict[str, Any], default: float) -> float:
    return check_fmr(as_float(arguments, "fmr", default))


def as_positive(arguments: dict[str, Any], key: str, default: float) -> float:
    value = as_float(arguments, key, default)
    if not value > 0.0:
        raise UsageError(f"--{key.replace('_', '-')} must be > 0, got {value}")
    return value


def guarded(command: str, reports: ReportRepository, tool_version: str, body: Body) -> Callable[[dict[str, Any]], CommandResult]:
    """Run ``body``, write ``<command>.manifest.json`` and turn failures into exit codes.

    ``body`` returns (outputs, summary, parameters, inputs); outputs land in
    the manifest next to every parameter that shaped them.
    """

    def handler(arguments: dict[str, Any]) -> CommandResult:
        clock = time.perf_counter()
        manifest = RunManifest(command=command, tool_version=tool_version)
        try:
            out_dir = as_path(arguments, "out")
            outputs, summary, parameters, inputs = body(arguments)
            manifest = manifest.model_copy(
                update={
                    "parameters": to_document(parameters),
                    "inputs": {k: str(v) for k, v in inputs.items() if v is not None},
                    "outputs": {k: str(v) for k, v in outputs.items()},
                    "wall_clock_seconds": round(time.perf_counter() - clock, 6),
                }
            )
            reports.save_manifest(out_dir / f"{command}.manifest.json", manifest)
        except PrefiqsError as exc:
            logger.error("Command failed command=%s error=%s: %s", command, type(exc).__name__, exc)
            return CommandResult(success=False, message=f"{type(exc).__name__}: {exc}", exit_code=exc.exit_code)
        except OSError as exc:
            logger.error("Command I/O failure command=%s error=%s", command, exc)
            return CommandResult(success=False, message=f"I/O error: {exc}", exit_code=EXIT_IO)

        logger.info("Command finished command=%s seconds=%.3f", command, manifest.wall_clock_seconds)
        return CommandResult(
            success=True,
            data={"outputs": {k: str(v) for k, v in outputs.items()}, **to_document(summary)},
            message=f"{command} finished",
        )

    return handler
