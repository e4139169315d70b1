"""Exception hierarchy shared by every layer.

Each error carries the process exit code the CLI reports for it:
2 for usage/validation, 3 for I/O and artifact format problems, 4 for
domain failures.
"""
from __future__ import annotations


EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DOMAIN = 4


class PrefiqsError(Exception):
    exit_code: int = EXIT_DOMAIN


# usage / validation
class UsageError(PrefiqsError):
    exit_code = EXIT_USAGE


class ConfigInvalid(PrefiqsError):
    exit_code = EXIT_USAGE


class RhoOutOfRange(PrefiqsError):
    exit_code = EXIT_USAGE


# artifact formats
class ArtifactFormatError(PrefiqsError):
    exit_code = EXIT_IO


class BadMagic(ArtifactFormatError):
    pass


class VersionUnsupported(ArtifactFormatError):
    pass


class Truncated(ArtifactFormatError):
    pass


class ManifestInvalid(ArtifactFormatError):
    pass


# numerics
class ShapeMismatch(PrefiqsError):
    pass


class NonIntegralOutputSize(PrefiqsError):
    pass


class ZeroNorm(PrefiqsError):
    pass


class NonFiniteValue(PrefiqsError):
    pass


class LengthMismatch(PrefiqsError):
    pass


class DimensionMismatch(PrefiqsError):
    pass


# pruning / scoring / jvp
class UnsupportedTopology(PrefiqsError):
    pass


class DriftOutOfRange(PrefiqsError):
    pass


class StepTooLarge(PrefiqsError):
    pass


class EmptySampleSet(PrefiqsError):
    pass


# evaluation
class EmptyGenuine(PrefiqsError):
    pass


class EmptyScores(PrefiqsError):
    pass


class MissingQuality(PrefiqsError):
    pass


class MissingEmbedding(PrefiqsError):
    pass


class EmptyGrid(PrefiqsError):
    pass


class GridTooShort(PrefiqsError):
    pass


# synthlab
class UnsupportedArch(PrefiqsError):
    pass


class NonFiniteLoss(PrefiqsError):
    pass
