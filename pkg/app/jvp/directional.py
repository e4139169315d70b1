"""First-order check of the drift: ||J_theta(x) . delta_theta||_2 by central differences.

J is the Jacobian of the L2-normalized embedding with respect to the flat
parameter vector, and delta_theta is the additive perturbation that turns the
original model into the masked one. The directional derivative is taken in
float64 on copies of the parameters, with epsilon chosen so that
||epsilon * delta_theta|| = step * ||theta||.
"""
from __future__ import annotations

from collections.abc import Sequence
import logging

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator
from scipy import stats

from app.core.errors import EmptySampleSet, LengthMismatch, StepTooLarge
from app.core.types import JvpRecord, ValidationReport
from app.core.workers import ordered_map
from app.model.network import Model, forward
from app.model.params import apply_mask, mask_bits, param_vector_view, scatter
from app.pruning.masks import PruneMask, check_mask_length
from app.scoring.drift import drift, embedding_distance


logger = logging.getLogger(__name__)

DEFAULT_STEP = 1e-4
GAP_FLOOR = 1e-12
# Samples sitting on a ReLU kink disagree under halving; judge the step on the bulk.
HALVING_QUANTILE = 0.95


class PerturbationVector(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    delta: np.ndarray
    rho: float = 0.0
    criterion: str = ""

    @model_validator(mode="after")
    def _freeze(self) -> "PerturbationVector":
        self.delta.flags.writeable = False
        return self

    @property
    def norm(self) -> float:
        wide = self.delta.astype(np.float64)
        return float(np.sqrt(np.einsum("i,i->", wide, wide)))


def delta_theta(model: Model, mask: PruneMask | np.ndarray) -> PerturbationVector:
    """Delta_i = -theta_i where the mask prunes, zero elsewhere.

    Kept entries are -0.0 so that theta + delta reproduces the kept weights
    bit-exactly, signed zeros included.
    """
    bits = mask_bits(mask)
    view = param_vector_view(model)
    if bits.shape != (len(view),):
        raise LengthMismatch(f"mask length {bits.size} != N={len(view)}")
    delta = np.where(bits, np.float32(-0.0), -view.values).astype(view.values.dtype)
    return PerturbationVector(
        delta=delta,
        rho=getattr(mask, "rho", 0.0),
        criterion=str(getattr(mask, "criterion", "")),
    )


class CentralDifference:
    """The two perturbed models theta +/- epsilon * delta, built once and shared across samples."""

    def __init__(self, model: Model, dtheta: PerturbationVector, step: float = DEFAULT_STEP):
        self.step = float(step)
        theta = param_vector_view(model).values.astype(np.float64)
        direction = dtheta.delta.astype(np.float64)
        theta_norm = float(np.sqrt(np.einsum("i,i->", theta, theta)))
        direction_norm = dtheta.norm
        self.zero_direction = direction_norm == 0.0
        if self.zero_direction:
            self.epsilon = 0.0
            return
        self.epsilon = self.step * theta_norm / direction_norm
        if not 0.0 < self.epsilon < 1.0:
            raise StepTooLarge(
                f"epsilon={self.epsilon:.3e} from step={self.step:g}; perturbation must stay below the removal point"
            )
        wide = model.astype(np.float64)
        self.plus = scatter(wide, theta + self.epsilon * direction)
        self.minus = scatter(wide, theta - self.epsilon * direction)

    def norm(self, x: np.ndarray) -> float:
        if self.zero_direction:
            return 0.0
        wide = np.asarray(x, dtype=np.float64)
        return embedding_distance(forward(self.plus, wide), forward(self.minus, wide)) / (2.0 * self.epsilon)


def jvp_norm(model: Model, dtheta: PerturbationVector, x: np.ndarray, step: float = DEFAULT_STEP) -> float:
    return CentralDifference(model, dtheta, step).norm(x)


def _relative_diff(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    if scale == 0.0:
        return 0.0
    return abs(a - b) / scale


def rank_correlations(a: Sequence[float], b: Sequence[float]) -> tuple[float | None, float | None]:
    """(spearman, pearson), or (None, None) when either side is constant."""
    left = np.asarray(a, dtype=np.float64)
    right = np.asarray(b, dtype=np.float64)
    if left.size < 2 or np.ptp(left) == 0.0 or np.ptp(right) == 0.0:
        return None, None
    spearman = float(stats.spearmanr(left, right).statistic)
    pearson = float(stats.pearsonr(left, right).statistic)
    return spearman, pearson


def validate_first_order(
    model: Model,
    mask: PruneMask,
    samples: Sequence[tuple[str, np.ndarray]],
    step: float = DEFAULT_STEP,
    halving_tolerance: float = 1e-3,
    threads: int | None = None,
) -> ValidationReport:
    """Compare jvp_norm with the empirical drift over ``samples``.

    The step counts as valid when the 95th percentile of the per-sample
    relative difference between ``step`` and ``step / 2`` is within
    ``halving_tolerance``; the maximum is reported alongside.
    """
    if not samples:
        raise EmptySampleSet("first-order validation needs at least one sample")
    check_mask_length(mask, model)

    pruned = apply_mask(model, mask)
    dtheta = delta_theta(model, mask)
    difference = CentralDifference(model, dtheta, step)
    half_difference = CentralDifference(model, dtheta, step / 2.0)

    def evaluate(sample: tuple[str, np.ndarray]) -> tuple[JvpRecord, float]:
        sample_id, x = sample
        full = difference.norm(x)
        half = half_difference.norm(x)
        record = JvpRecord(sample_id=sample_id, jvp_norm=full, empirical_drift=drift(model, pruned, x))
        return record, _relative_diff(full, half)

    results = ordered_map(evaluate, samples, threads=threads)
    records = [record for record, _ in results]
    diffs = np.array([diff for _, diff in results])
    halving = float(np.quantile(diffs, HALVING_QUANTILE))

    jvps = [r.jvp_norm for r in records]
    drifts = [r.empirical_drift for r in records]
    spearman, pearson = rank_correlations(jvps, drifts)
    gaps = [abs(j - d) / max(d, GAP_FLOOR) for j, d in zip(jvps, drifts)]
    valid = halving <= halving_tolerance

    if spearman is None:
        logger.warning("JVP validation correlation undefined samples=%s (constant values)", len(records))
    if not valid:
        logger.warning("Step-halving disagreement p95=%.3e exceeds tolerance %.1e", halving, halving_tolerance)
    logger.info(
        "JVP validation samples=%s rho=%s spearman=%s halving_p95=%.3e", len(records), mask.rho, spearman, halving
    )
    return ValidationReport(
        rho=mask.rho,
        step=step,
        records=records,
        spearman=spearman,
        pearson=pearson,
        degenerate_correlation=spearman is None,
        mean_relative_gap=float(np.mean(gaps)),
        step_halving_max_relative_diff=float(diffs.max()),
        step_halving_p95_relative_diff=halving,
        first_order_valid=valid,
    )
