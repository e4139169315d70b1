from __future__ import annotations

from collections.abc import Sequence
import logging
from pathlib import Path

import numpy as np

from app.core.workers import ordered_map
from app.evaluation.metrics import EmbeddingSet
from app.model.network import Model, forward
from app.repositories.artifact_repository import ArtifactRepository
from app.repositories.dataset_repository import DatasetRepository
from app.repositories.evaluation_repository import EvaluationRepository


logger = logging.getLogger(__name__)

EMBEDDINGS_FILE = "embeddings.csv"


class EmbeddingService:
    def __init__(
        self,
        artifacts: ArtifactRepository,
        datasets: DatasetRepository,
        tables: EvaluationRepository,
        threads: int | None = None,
    ):
        self.artifacts = artifacts
        self.datasets = datasets
        self.tables = tables
        self.threads = threads

    def embed_samples(self, model: Model, samples: Sequence[tuple[str, np.ndarray]]) -> EmbeddingSet:
        vectors = ordered_map(lambda sample: forward(model, sample[1]), samples, threads=self.threads)
        matrix = np.stack(vectors).astype(np.float32) if vectors else np.zeros((0, model.d), dtype=np.float32)
        return EmbeddingSet(ids=tuple(sample_id for sample_id, _ in samples), matrix=matrix)

    def embed(self, model_path: Path, inputs_path: Path, out_dir: Path) -> dict[str, Path]:
        model = self.artifacts.load_model(model_path)
        dataset = self.datasets.load(inputs_path)
        embeddings = self.embed_samples(model, dataset.samples())
        output = self.tables.save_embeddings(Path(out_dir) / EMBEDDINGS_FILE, embeddings.ids, embeddings.matrix)
        logger.info("Embedded samples=%s d=%s out=%s", len(embeddings.ids), model.d, output)
        return {"embeddings": output}
