from __future__ import annotations

from pathlib import Path

import numpy as np

from app.core.errors import ArtifactFormatError
from app.repositories.files import format_float, parse_number, read_table, write_table
from app.synthlab.generator import SynthDataset

DATASET_PREFIX = ("id", "label", "sigma")


class DatasetRepository:
    """Dataset CSV: ``id,label,sigma,x0..x{n-1}``."""

    def save(self, path: Path, dataset: SynthDataset) -> Path:
        header = [*DATASET_PREFIX, *(f"x{i}" for i in range(dataset.input_dim))]
        rows = (
            [sample_id, str(label), format_float(sigma), *(format_float(v) for v in x)]
            for sample_id, x, label, sigma in dataset.rows()
        )
        return write_table(path, header, rows)

    def load(self, path: Path) -> SynthDataset:
        header, body = read_table(path, DATASET_PREFIX)
        width = len(header) - len(DATASET_PREFIX)
        if width < 1 or header[len(DATASET_PREFIX):] != [f"x{i}" for i in range(width)]:
            raise ArtifactFormatError(f"{path}: input columns must be x0..x{{n-1}}")
        if not body:
            raise ArtifactFormatError(f"{path}: dataset has no rows")
        try:
            labels = np.array([int(row[1]) for row in body], dtype=np.int64)
        except ValueError as exc:
            raise ArtifactFormatError(f"{path}: non-integer label") from exc
        sigmas = np.array([parse_number(row[2], path, "sigma") for row in body], dtype=np.float64)
        inputs = np.array(
            [[parse_number(v, path, "x") for v in row[len(DATASET_PREFIX):]] for row in body],
            dtype=np.float32,
        )
        return SynthDataset(ids=tuple(row[0] for row in body), inputs=inputs, labels=labels, sigmas=sigmas)
