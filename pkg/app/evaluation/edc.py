"""Error-versus-discard curves.

Images are discarded lowest quality first (ties by ascending id). A pair
survives a discard level when both of its images survive. The threshold is
fixed once, from every impostor score at zero discard.
"""
from __future__ import annotations

from collections.abc import Mapping, Sequence
import logging
import math

import numpy as np

from app.core.errors import EmptyGenuine, EmptyGrid, GridTooShort, MissingQuality, UsageError
from app.core.types import EdcCurve, EdcPoint
from app.evaluation.metrics import EmbeddingSet, PairList, check_fmr, fnmr_at_threshold, pair_scores, threshold_at_fmr


logger = logging.getLogger(__name__)

GRID_TOLERANCE = 1e-12


def default_grid(step: float = 0.01, maximum: float = 0.95) -> list[float]:
    count = int(math.floor(maximum / step + 1e-9))
    return [round(i * step, 10) for i in range(count + 1)]


def discard_order(image_ids: Sequence[str], qualities: Mapping[str, float]) -> dict[str, int]:
    """Rank of each image in discard order; rank 0 goes first."""
    missing = [i for i in image_ids if i not in qualities]
    if missing:
        raise MissingQuality(f"no quality for image {missing[0]!r} ({len(missing)} missing)")
    ranked = sorted(image_ids, key=lambda i: (float(qualities[i]), i))
    return {sample_id: rank for rank, sample_id in enumerate(ranked)}


def _check_grid(grid: Sequence[float]) -> np.ndarray:
    values = np.asarray(grid, dtype=np.float64)
    if values.size == 0:
        raise EmptyGrid("discard grid is empty")
    if values[0] != 0.0:
        raise UsageError(f"discard grid must start at 0, got {values[0]}")
    if np.any(np.diff(values) <= 0) or values[-1] >= 1.0:
        raise UsageError("discard grid must be strictly increasing within [0, 1)")
    return values


def edc_curve(
    embeddings: EmbeddingSet,
    pairs: PairList,
    qualities: Mapping[str, float],
    fmr: float,
    grid: Sequence[float] | None = None,
    quality_source: str = "",
) -> EdcCurve:
    fmr = check_fmr(fmr)
    fractions = _check_grid(default_grid() if grid is None else grid)
    if pairs.scores is None:
        scores = pair_scores(embeddings, pairs)
    else:
        embeddings.rows(pairs.image_ids())
        scores = pairs.scores
    genuine = pairs.genuine
    if not np.any(genuine):
        raise EmptyGenuine("pair list has no genuine pairs")

    operating = threshold_at_fmr(scores[~genuine], fmr)
    tau = operating.threshold

    image_ids = pairs.image_ids()
    rank = discard_order(image_ids, qualities)
    # a pair is gone once the first of its two images is discarded
    first_gone = np.minimum(
        np.array([rank[i] for i in pairs.id_a], dtype=np.int64),
        np.array([rank[i] for i in pairs.id_b], dtype=np.int64),
    )
    genuine_scores = scores[genuine]
    genuine_gone = first_gone[genuine]
    n_images = len(image_ids)

    points: list[EdcPoint] = []
    for fraction in fractions:
        discarded = int(math.floor(fraction * n_images + 1e-9))
        surviving = genuine_scores[genuine_gone >= discarded]
        if surviving.size == 0:
            previous = points[-1].fnmr if points else 0.0
            logger.info("No genuine pairs survive discard=%.4f; carrying fnmr=%.6f forward", fraction, previous)
            points.append(EdcPoint(discard_fraction=float(fraction), fnmr=previous, carried_forward=True))
            continue
        points.append(EdcPoint(discard_fraction=float(fraction), fnmr=fnmr_at_threshold(surviving, tau)))

    logger.info(
        "EDC source=%s fmr=%s tau=%.6f images=%s pairs=%s points=%s",
        quality_source or "-", fmr, tau, n_images, len(pairs), len(points),
    )
    return EdcCurve(
        fmr_target=fmr,
        threshold=tau,
        achieved_fmr=operating.achieved_fmr,
        points=points,
        quality_source=quality_source,
        insufficient_impostors=operating.insufficient_impostors,
    )


def pauc(
    curve: EdcCurve,
    max_discard: float,
    min_discard: float = 0.0,
    allow_extension: bool = True,
) -> float:
    """Trapezoidal area under the curve between two discard fractions.

    When ``max_discard`` lies past the last grid point the final segment is
    extended linearly, clamped to [0, 1].
    """
    xs = np.asarray(curve.discard_fractions, dtype=np.float64)
    ys = np.asarray(curve.fnmrs, dtype=np.float64)
    if xs.size == 0 or xs[0] != 0.0:
        raise GridTooShort("curve must start at discard fraction 0")
    if not 0.0 <= min_discard <= max_discard:
        raise UsageError(f"invalid pAUC range [{min_discard}, {max_discard}]")

    if max_discard > xs[-1] + GRID_TOLERANCE:
        if not allow_extension or xs.size < 2:
            raise GridTooShort(f"curve ends at {xs[-1]}, cannot integrate to {max_discard}")
        slope = (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])
        tail = min(1.0, max(0.0, ys[-1] + slope * (max_discard - xs[-1])))
        xs = np.append(xs, max_discard)
        ys = np.append(ys, tail)

    inner = xs[(xs > min_discard) & (xs < max_discard)]
    knots = np.concatenate([[min_discard], inner, [max_discard]])
    return float(np.trapezoid(np.interp(knots, xs, ys), knots))


def auc(curve: EdcCurve, max_discard: float = 0.95) -> float:
    return pauc(curve, max_discard, allow_extension=False)


def scaled(area: float) -> float:
    """Areas are reported multiplied by 10^3."""
    return area * 1e3
