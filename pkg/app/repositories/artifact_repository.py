from __future__ import annotations

from pathlib import Path

from pydantic import ValidationError

from app.core.errors import ManifestInvalid
from app.model.network import Model
from app.model.serialization import load_model, save_model
from app.pruning.masks import PruneMask
from app.pruning.sidecar import load_mask, save_mask
from app.pruning.structured import StructuredPlan
from app.repositories.files import read_json, write_bytes, write_json


class ArtifactRepository:
    """Binary model files, mask sidecars and structured-pruning plans."""

    def save_model(self, path: Path, model: Model) -> Path:
        return write_bytes(path, save_model(model))

    def load_model(self, path: Path) -> Model:
        return load_model(Path(path).read_bytes())

    def save_mask(self, path: Path, mask: PruneMask) -> Path:
        return write_bytes(path, save_mask(mask))

    def load_mask(self, path: Path) -> PruneMask:
        return load_mask(Path(path).read_bytes())

    def save_plan(self, path: Path, plan: StructuredPlan) -> Path:
        return write_json(path, plan.model_dump(mode="json"))

    def load_plan(self, path: Path) -> StructuredPlan:
        try:
            return StructuredPlan.model_validate(read_json(path))
        except ValidationError as exc:
            raise ManifestInvalid(f"{path}: invalid structured plan") from exc
