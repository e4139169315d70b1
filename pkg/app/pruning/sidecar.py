"""``.pfqmask`` sidecar: one JSON header line, then the bit-packed mask.

Header keys (sorted, compact): criterion, format ("pfqmask"), granularity, n,
rho, seed, tau, version. Payload: ``ceil(n / 8)`` bytes, bit i of the mask at
bit ``i % 8`` of byte ``i // 8`` (little-endian bit order).
"""
from __future__ import annotations

import json

import numpy as np
from pydantic import ValidationError

from app.core.errors import BadMagic, ManifestInvalid, Truncated, VersionUnsupported
from app.pruning.masks import PruneMask

FORMAT_NAME = "pfqmask"
FORMAT_VERSION = 1


def save_mask(mask: PruneMask) -> bytes:
    header = {
        "criterion": mask.criterion.value,
        "format": FORMAT_NAME,
        "granularity": mask.granularity.value,
        "n": mask.n,
        "rho": mask.rho,
        "seed": mask.seed,
        "tau": mask.tau,
        "version": FORMAT_VERSION,
    }
    line = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8") + b"\n"
    return line + np.packbits(mask.bits, bitorder="little").tobytes()


def load_mask(payload: bytes) -> PruneMask:
    newline = payload.find(b"\n")
    if not payload.startswith(b"{") or newline < 0:
        raise BadMagic("not a pfqmask stream: missing JSON header line")
    try:
        header = json.loads(payload[:newline].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ManifestInvalid(f"mask header unreadable: {exc}") from exc
    if header.get("format") != FORMAT_NAME:
        raise BadMagic(f"format tag {header.get('format')!r} is not {FORMAT_NAME!r}")
    if header.get("version") != FORMAT_VERSION:
        raise VersionUnsupported(f"pfqmask version {header.get('version')} is not supported")

    try:
        n = int(header["n"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ManifestInvalid(f"mask header lacks a valid n: {exc}") from exc
    body = payload[newline + 1 :]
    expected = (n + 7) // 8
    if len(body) < expected:
        raise Truncated(f"mask payload has {len(body)} bytes, expected {expected}")
    if len(body) > expected:
        raise ManifestInvalid(f"{len(body) - expected} trailing bytes after the mask payload")

    bits = np.unpackbits(np.frombuffer(body, dtype=np.uint8), count=n, bitorder="little")
    try:
        return PruneMask(
            bits=bits,
            rho=header["rho"],
            criterion=header["criterion"],
            granularity=header["granularity"],
            seed=header.get("seed"),
            tau=header.get("tau"),
        )
    except (KeyError, ValidationError) as exc:
        raise ManifestInvalid(f"mask header invalid: {exc}") from exc
