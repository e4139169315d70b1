"""Mask construction (L1 magnitude, random) and structured channel pruning."""
from app.pruning.masks import (
    Criterion,
    Granularity,
    PruneMask,
    build_mask,
    build_mask_l1_global,
    build_mask_random,
    identity_mask,
    prune_count,
    sparsity,
)
from app.pruning.sidecar import load_mask, save_mask
from app.pruning.structured import StructuredPlan, apply_structured, build_structured_plan

__all__ = [
    "Criterion",
    "Granularity",
    "PruneMask",
    "StructuredPlan",
    "apply_structured",
    "build_mask",
    "build_mask_l1_global",
    "build_mask_random",
    "build_structured_plan",
    "identity_mask",
    "load_mask",
    "prune_count",
    "save_mask",
    "sparsity",
]
