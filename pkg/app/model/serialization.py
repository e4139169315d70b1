"""PFQM single-file model format.

Layout (all integers little-endian)::

    b"PFQM" | u32 version (=1) | u64 manifest length | UTF-8 JSON manifest |
    float32 LE parameters, every layer's tensors in declaration order

The manifest is written with sorted keys and compact separators so the same
model always serializes to the same bytes.
"""
from __future__ import annotations

import json
import struct

import numpy as np
from pydantic import ValidationError

from app.core.errors import BadMagic, ManifestInvalid, PrefiqsError, Truncated, VersionUnsupported
from app.model.layers import LayerSpec
from app.model.network import Model

MAGIC = b"PFQM"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIQ")


def build_manifest(model: Model) -> dict:
    return {
        "d": model.d,
        "input_shape": list(model.input_shape),
        "layers": [layer.model_dump(mode="json", exclude_none=True) for layer in model.layers],
        "param_counts": [sum(t.size for t in group) for group in model.params],
    }


def save_model(model: Model) -> bytes:
    manifest = json.dumps(build_manifest(model), sort_keys=True, separators=(",", ":")).encode("utf-8")
    tensors = [t.astype("<f4").tobytes() for group in model.params for t in group]
    return _HEADER.pack(MAGIC, FORMAT_VERSION, len(manifest)) + manifest + b"".join(tensors)


def load_model(payload: bytes) -> Model:
    if len(payload) < 4:
        raise Truncated("stream shorter than the magic bytes")
    if payload[:4] != MAGIC:
        raise BadMagic(f"expected {MAGIC!r}, found {payload[:4]!r}")
    if len(payload) < _HEADER.size:
        raise Truncated("stream ends inside the header")
    _, version, manifest_length = _HEADER.unpack_from(payload)
    if version != FORMAT_VERSION:
        raise VersionUnsupported(f"PFQM version {version} is not supported (expected {FORMAT_VERSION})")

    body_start = _HEADER.size + manifest_length
    if len(payload) < body_start:
        raise Truncated("stream ends inside the manifest")
    try:
        manifest = json.loads(payload[_HEADER.size : body_start].decode("utf-8"))
        layers = [LayerSpec.model_validate(item) for item in manifest["layers"]]
        input_shape = tuple(int(v) for v in manifest["input_shape"])
        declared_counts = [int(v) for v in manifest["param_counts"]]
        declared_d = int(manifest["d"])
    except (UnicodeDecodeError, json.JSONDecodeError, KeyError, TypeError, ValueError, ValidationError) as exc:
        raise ManifestInvalid(f"manifest unreadable: {exc}") from exc

    shapes = [layer.param_shapes() for layer in layers]
    counts = [sum(int(np.prod(shape)) for shape in group) for group in shapes]
    if counts != declared_counts:
        raise ManifestInvalid(f"param_counts {declared_counts} disagree with layer shapes {counts}")

    expected_bytes = 4 * sum(counts)
    available = len(payload) - body_start
    if available < expected_bytes:
        raise Truncated(f"parameter block has {available} bytes, expected {expected_bytes}")
    if available > expected_bytes:
        raise ManifestInvalid(f"{available - expected_bytes} trailing bytes after the parameter block")

    values = np.frombuffer(payload, dtype="<f4", count=sum(counts), offset=body_start).astype(np.float32)
    params = []
    cursor = 0
    for group in shapes:
        tensors = []
        for shape in group:
            size = int(np.prod(shape))
            tensors.append(values[cursor : cursor + size].reshape(shape))
            cursor += size
        params.append(tensors)

    try:
        model = Model(layers=layers, params=params, input_shape=input_shape)
    except (PrefiqsError, ValidationError) as exc:
        raise ManifestInvalid(f"manifest describes an invalid model: {exc}") from exc
    if model.d != declared_d:
        raise ManifestInvalid(f"manifest d={declared_d} but the embedding head has {model.d} outputs")
    return model
