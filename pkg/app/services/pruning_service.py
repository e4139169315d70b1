from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

from app.core.errors import UsageError
from app.model.network import Model
from app.model.params import apply_mask
from app.pruning.masks import Criterion, Granularity, PruneMask, build_mask, check_rho
from app.pruning.structured import StructuredPlan, apply_structured, build_structured_plan
from app.repositories.artifact_repository import ArtifactRepository


logger = logging.getLogger(__name__)

PRUNED_FILE = "pruned.pfqm"
MASK_FILE = "mask.pfqmask"
PLAN_FILE = "plan.json"


class PruningService:
    def __init__(self, artifacts: ArtifactRepository):
        self.artifacts = artifacts

    def prune_model(
        self,
        model: Model,
        rho: float,
        criterion: Criterion,
        granularity: Granularity,
        seed: int | None = None,
    ) -> tuple[Model, PruneMask | StructuredPlan]:
        check_rho(rho)
        if granularity == Granularity.STRUCTURED:
            if criterion != Criterion.L1_MAGNITUDE:
                raise UsageError(f"structured pruning ranks channels by L1 norm; criterion {criterion.value!r} is not supported")
            plan = build_structured_plan(model, rho)
            return apply_structured(model, plan), plan
        mask = build_mask(model, rho, criterion, seed)
        return apply_mask(model, mask), mask

    def prune(
        self,
        model_path: Path,
        rho: float,
        criterion: Criterion,
        granularity: Granularity,
        seed: int | None,
        out_dir: Path,
    ) -> tuple[dict[str, Path], dict[str, Any]]:
        out = Path(out_dir)
        model = self.artifacts.load_model(model_path)
        pruned, selection = self.prune_model(model, rho, criterion, granularity, seed)

        outputs = {"pruned": self.artifacts.save_model(out / PRUNED_FILE, pruned)}
        if isinstance(selection, StructuredPlan):
            outputs["plan"] = self.artifacts.save_plan(out / PLAN_FILE, selection)
            summary = {"removed_units": sum(len(e.removed) for e in selection.entries)}
        else:
            outputs["mask"] = self.artifacts.save_mask(out / MASK_FILE, selection)
            summary = {"n": selection.n, "zeros": selection.count_zeros(), "tau": selection.tau}
        logger.info(
            "Pruned model rho=%s criterion=%s granularity=%s summary=%s",
            rho, criterion.value, granularity.value, summary,
        )
        return outputs, summary
