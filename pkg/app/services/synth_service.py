from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

from app.config.experiment import ExperimentConfig, load_experiment
from app.repositories.artifact_repository import ArtifactRepository
from app.repositories.dataset_repository import DatasetRepository
from app.repositories.evaluation_repository import EvaluationRepository
from app.repositories.report_repository import ReportRepository
from app.synthlab.generator import build_pairs, generate_dataset
from app.synthlab.trainer import classification_accuracy, fit


logger = logging.getLogger(__name__)

DATASET_FILE = "dataset.csv"
PAIRS_FILE = "pairs.csv"
MODEL_FILE = "model.pfqm"
TRAINING_FILE = "training.json"


class SynthService:
    """Generates the synthetic dataset, its comparison pairs and a trained toy model."""

    def __init__(
        self,
        datasets: DatasetRepository,
        artifacts: ArtifactRepository,
        tables: EvaluationRepository,
        reports: ReportRepository,
    ):
        self.datasets = datasets
        self.artifacts = artifacts
        self.tables = tables
        self.reports = reports

    def load_config(self, config_path: Path, seed: int | None = None) -> ExperimentConfig:
        return load_experiment(config_path).with_seed(seed)

    def run(self, config: ExperimentConfig, out_dir: Path) -> tuple[dict[str, Path], dict[str, Any]]:
        out = Path(out_dir)
        dataset = generate_dataset(config.synth)
        pairs = build_pairs(dataset, max_impostors=config.pairs.max_impostors, seed=config.pairs.seed)
        run = fit(dataset, config.train)
        accuracy = classification_accuracy(run, dataset)

        summary = {
            "n_samples": len(dataset),
            "n_pairs": len(pairs),
            "n_genuine": int(pairs.genuine.sum()),
            "epoch_losses": run.epoch_losses,
            "train_accuracy": accuracy,
        }
        outputs = {
            "dataset": self.datasets.save(out / DATASET_FILE, dataset),
            "pairs": self.tables.save_pairs(out / PAIRS_FILE, pairs),
            "model": self.artifacts.save_model(out / MODEL_FILE, run.model),
            "training": self.reports.save_report(out / TRAINING_FILE, summary),
        }
        logger.info(
            "Synth complete samples=%s pairs=%s final_loss=%.6f train_accuracy=%.4f",
            len(dataset), len(pairs), run.final_loss, accuracy,
        )
        return outputs, summary
