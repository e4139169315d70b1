"""Shared helpers for the artifact files: CSV tables and JSON documents.

Tables use LF line endings and 17 significant digits for floats. JSON is
written with sorted keys; infinities are stored as the strings "+inf"/"-inf"
because JSON has no literal for them.
"""
from __future__ import annotations

from collections.abc import Iterable, Sequence
import csv
import io
import json
import math
import os
from pathlib import Path
import tempfile
from typing import Any

from app.core.errors import ArtifactFormatError


def format_float(value: float | None) -> str:
    if value is None:
        return ""
    return format(float(value), ".17g")


def encode_float(value: float | None) -> float | str | None:
    if value is None:
        return None
    if math.isinf(value):
        return "+inf" if value > 0 else "-inf"
    return float(value)


def decode_float(value: float | str | None) -> float | None:
    if value is None:
        return None
    if value == "+inf":
        return math.inf
    if value == "-inf":
        return -math.inf
    return float(value)


def write_bytes(path: Path, payload: bytes) -> Path:
    """Write through a sibling temp file so readers never see a partial file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with tempfile.NamedTemporaryFile(dir=path.parent, prefix=f".{path.name}.", delete=False) as handle:
        handle.write(payload)
        staged = Path(handle.name)
    try:
        os.replace(staged, path)
    except OSError:
        staged.unlink(missing_ok=True)
        raise
    return path


def write_table(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return write_bytes(path, buffer.getvalue().encode("utf-8"))


def read_table(path: Path, expected_prefix: Sequence[str]) -> tuple[list[str], list[list[str]]]:
    """Rows of a CSV whose header starts with ``expected_prefix``."""
    text = Path(path).read_text(encoding="utf-8")
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise ArtifactFormatError(f"{path}: empty table")
    header = rows[0]
    if header[: len(expected_prefix)] != list(expected_prefix):
        raise ArtifactFormatError(f"{path}: header {header[:len(expected_prefix)]} != {list(expected_prefix)}")
    body = [row for row in rows[1:] if row]
    width = len(header)
    for number, row in enumerate(body, start=2):
        if len(row) != width:
            raise ArtifactFormatError(f"{path}:{number}: expected {width} fields, found {len(row)}")
    return header, body


def parse_number(text: str, path: Path, field: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise ArtifactFormatError(f"{path}: {field}={text!r} is not a number") from exc


def dump_json(document: Any) -> bytes:
    return (json.dumps(document, indent=2, sort_keys=True, allow_nan=False) + "\n").encode("utf-8")


def write_json(path: Path, document: Any) -> Path:
    return write_bytes(path, dump_json(document))


def read_json(path: Path) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ArtifactFormatError(f"{path}: invalid JSON ({exc.msg})") from exc


def to_document(value: Any) -> Any:
    """Plain JSON-ready structure; pydantic models are dumped, infinities encoded."""
    if hasattr(value, "model_dump"):
        value = value.model_dump(mode="python")
    if isinstance(value, dict):
        return {str(k): to_document(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_document(v) for v in value]
    if isinstance(value, float):
        return encode_float(value)
    if isinstance(value, Path):
        return str(value)
    if hasattr(value, "isoformat"):
        return value.isoformat()
    if hasattr(value, "item"):
        return to_document(value.item())
    return value
