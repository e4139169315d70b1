from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path

from app.core.types import JvpRecord, ScoreRecord
from app.repositories.files import format_float, parse_number, read_table, write_table

SCORE_HEADER = ("sample_id", "drift", "quality")
JVP_HEADER = ("sample_id", "jvp_norm", "empirical_drift")
FAILURE_HEADER = ("sample_id", "error")


class ScoreRepository:
    """Per-sample score tables. Failed samples keep their row with empty values."""

    def save_scores(self, path: Path, records: Sequence[ScoreRecord]) -> Path:
        rows = ([r.sample_id, format_float(r.drift), format_float(r.quality)] for r in records)
        return write_table(path, SCORE_HEADER, rows)

    def save_failures(self, path: Path, records: Sequence[ScoreRecord]) -> Path:
        """Reason for every empty row of the matching scores table."""
        return write_table(path, FAILURE_HEADER, ([r.sample_id, r.error] for r in records if not r.ok))

    def load_qualities(self, path: Path) -> dict[str, float]:
        _, body = read_table(path, SCORE_HEADER)
        return {row[0]: parse_number(row[2], path, "quality") for row in body if row[2] != ""}

    def save_jvp(self, path: Path, records: Sequence[JvpRecord]) -> Path:
        rows = ([r.sample_id, format_float(r.jvp_norm), format_float(r.empirical_drift)] for r in records)
        return write_table(path, JVP_HEADER, rows)
