from __future__ import annotations

from datetime import datetime, timezone
from typing import Any

from pydantic import BaseModel, Field


class ScoreRecord(BaseModel):
    sample_id: str
    drift: float | None = None
    quality: float | None = None
    rho: float
    criterion: str
    granularity: str
    clamped: bool = False
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


class ThresholdResult(BaseModel):
    threshold: float
    achieved_fmr: float
    allowed_false_matches: int
    n_impostors: int
    insufficient_impostors: bool = False


class EdcPoint(BaseModel):
    discard_fraction: float
    fnmr: float
    carried_forward: bool = False


class EdcCurve(BaseModel):
    fmr_target: float
    threshold: float
    achieved_fmr: float
    points: list[EdcPoint]
    quality_source: str = ""
    insufficient_impostors: bool = False

    @property
    def discard_fractions(self) -> list[float]:
        return [p.discard_fraction for p in self.points]

    @property
    def fnmrs(self) -> list[float]:
        return [p.fnmr for p in self.points]


class JvpRecord(BaseModel):
    sample_id: str
    jvp_norm: float
    empirical_drift: float


class ValidationReport(BaseModel):
    rho: float
    step: float
    records: list[JvpRecord]
    spearman: float | None = None
    pearson: float | None = None
    degenerate_correlation: bool = False
    mean_relative_gap: float
    step_halving_max_relative_diff: float
    step_halving_p95_relative_diff: float
    first_order_valid: bool
    pauc_drift_x1e3: float | None = None
    pauc_jvp_x1e3: float | None = None


class VerificationReport(BaseModel):
    accuracy: float
    best_threshold: float
    n_genuine: int
    n_impostor: int
    fnmr_at_fmr: dict[str, float] = Field(default_factory=dict)
    threshold_at_fmr: dict[str, float] = Field(default_factory=dict)
    insufficient_impostors: list[str] = Field(default_factory=list)


class RunManifest(BaseModel):
    command: str
    parameters: dict[str, Any] = Field(default_factory=dict)
    inputs: dict[str, str] = Field(default_factory=dict)
    outputs: dict[str, str] = Field(default_factory=dict)
    tool_version: str
    started_at: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))
    wall_clock_seconds: float = 0.0


class CommandResult(BaseModel):
    success: bool
    data: dict[str, Any] = Field(default_factory=dict)
    message: str = ""
    exit_code: int = 0


class CommandInputSchema(BaseModel):
    type: str = "object"
    properties: dict[str, Any]
    required: list[str] = Field(default_factory=list)


class CommandDefinition(BaseModel):
    name: str
    description: str
    input_schema: CommandInputSchema
