from __future__ import annotations

from pathlib import Path
from typing import Any

from pydantic import ValidationError

from app.core.errors import ManifestInvalid
from app.core.types import RunManifest
from app.repositories.files import read_json, to_document, write_json


class ReportRepository:
    """JSON reports, EDC sidecars and run manifests."""

    def save_report(self, path: Path, report: Any) -> Path:
        return write_json(path, to_document(report))

    def save_manifest(self, path: Path, manifest: RunManifest) -> Path:
        return write_json(path, to_document(manifest))

    def load_manifest(self, path: Path) -> RunManifest:
        try:
            return RunManifest.model_validate(read_json(path))
        except ValidationError as exc:
            raise ManifestInvalid(f"{path}: invalid run manifest") from exc
