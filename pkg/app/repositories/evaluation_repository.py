from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path

import numpy as np

from app.core.errors import ArtifactFormatError
from app.core.types import EdcCurve
from app.evaluation.metrics import EmbeddingSet, PairList
from app.repositories.files import format_float, parse_number, read_table, write_table

PAIRS_HEADER = ("id_a", "id_b", "genuine")
SCORE_COLUMN = "score"
EDC_HEADER = ("discard_fraction", "fnmr")
SWEEP_HEADER = ("criterion", "granularity", "rho", "pauc_x1e3", "accuracy")


class EvaluationRepository:
    def save_pairs(self, path: Path, pairs: PairList) -> Path:
        rows = [[a, b, "1" if g else "0"] for a, b, g in zip(pairs.id_a, pairs.id_b, pairs.genuine)]
        if pairs.scores is None:
            return write_table(path, PAIRS_HEADER, rows)
        for row, score in zip(rows, pairs.scores):
            row.append(format_float(score))
        return write_table(path, (*PAIRS_HEADER, SCORE_COLUMN), rows)

    def load_pairs(self, path: Path) -> PairList:
        header, body = read_table(path, PAIRS_HEADER)
        flags = {row[2] for row in body}
        if not flags <= {"0", "1"}:
            raise ArtifactFormatError(f"{path}: genuine must be 0 or 1")
        if header[3:] == [SCORE_COLUMN]:
            return PairList.from_rows(
                [(row[0], row[1], row[2] == "1", parse_number(row[3], path, SCORE_COLUMN)) for row in body]
            )
        if len(header) != len(PAIRS_HEADER):
            raise ArtifactFormatError(f"{path}: unexpected pair columns {header[3:]}")
        return PairList.from_rows([(row[0], row[1], row[2] == "1") for row in body])

    def save_embeddings(self, path: Path, ids: Sequence[str], vectors: np.ndarray) -> Path:
        header = ["id", *(f"v{i}" for i in range(vectors.shape[1]))]
        rows = ([sample_id, *(format_float(v) for v in vector)] for sample_id, vector in zip(ids, vectors))
        return write_table(path, header, rows)

    def load_embeddings(self, path: Path) -> EmbeddingSet:
        header, body = read_table(path, ("id",))
        width = len(header) - 1
        if width < 1 or header[1:] != [f"v{i}" for i in range(width)]:
            raise ArtifactFormatError(f"{path}: embedding columns must be v0..v{{d-1}}")
        matrix = np.array([[parse_number(v, path, "v") for v in row[1:]] for row in body], dtype=np.float32)
        return EmbeddingSet(ids=tuple(row[0] for row in body), matrix=matrix.reshape(len(body), width))

    def save_edc(self, path: Path, curve: EdcCurve) -> Path:
        rows = ([format_float(p.discard_fraction), format_float(p.fnmr)] for p in curve.points)
        return write_table(path, EDC_HEADER, rows)

    def save_sweep(self, path: Path, rows: Sequence[dict]) -> Path:
        lines = (
            [row["criterion"], row["granularity"], format_float(row["rho"]),
             format_float(row["pauc_x1e3"]), format_float(row["accuracy"])]
            for row in rows
        )
        return write_table(path, SWEEP_HEADER, lines)
