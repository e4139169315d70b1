"""Experiment configs read by ``synth --config``."""
from __future__ import annotations

import json
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from app.core.errors import ConfigInvalid
from app.synthlab.generator import SynthConfig
from app.synthlab.trainer import TrainConfig
from app.tensor.rng import check_seed


class PairConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    max_impostors: int = Field(default=50_000, ge=0)
    seed: int = Field(default=7, ge=0)


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    synth: SynthConfig
    train: TrainConfig
    pairs: PairConfig = PairConfig()

    @model_validator(mode="after")
    def _dimensions_agree(self) -> "ExperimentConfig":
        if self.train.arch[0] != self.synth.input_dim:
            raise ValueError(f"arch starts at {self.train.arch[0]} but input_dim is {self.synth.input_dim}")
        if self.train.arch[-1] != self.synth.embedding_dim:
            raise ValueError(f"arch ends at {self.train.arch[-1]} but embedding_dim is {self.synth.embedding_dim}")
        return self

    def with_seed(self, seed: int | None) -> "ExperimentConfig":
        """Override the generation and training seeds; pair sampling keeps its own."""
        if seed is None:
            return self
        seed = check_seed(seed)
        return self.model_copy(
            update={
                "synth": self.synth.model_copy(update={"seed": seed}),
                "train": self.train.model_copy(update={"seed": seed}),
            }
        )


def load_experiment(path: Path) -> ExperimentConfig:
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"{path}: invalid JSON ({exc.msg})") from exc
    try:
        return ExperimentConfig.model_validate(document)
    except ValidationError as exc:
        first = exc.errors()[0]
        location = ".".join(str(part) for part in first["loc"])
        raise ConfigInvalid(f"{path}: {location or 'config'}: {first['msg']}") from exc
