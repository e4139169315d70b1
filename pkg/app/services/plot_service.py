from __future__ import annotations

from collections.abc import Sequence
import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from app.core.types import EdcCurve


logger = logging.getLogger(__name__)

SVG_HASH_SALT = "prefiqs"


class PlotService:
    """EDC figures. Presentation only: every plotted value is also in the CSV."""

    def __init__(self) -> None:
        logging.getLogger("matplotlib").setLevel(logging.WARNING)
        plt.rcParams["svg.hashsalt"] = SVG_HASH_SALT
        plt.rcParams["svg.fonttype"] = "none"

    def draw_edc(self, curves: Sequence[tuple[str, EdcCurve]], output: Path, title: str = "EDC") -> Path:
        output = Path(output)
        output.parent.mkdir(parents=True, exist_ok=True)

        fig, ax = plt.subplots(figsize=(6, 4.5))
        for label, curve in curves:
            ax.plot(curve.discard_fractions, curve.fnmrs, marker="o", markersize=2.5, linewidth=1.2, label=label)
        if curves:
            ax.set_title(f"{title} (FMR={curves[0][1].fmr_target:g})")
        ax.set_xlabel("Fraction of discarded images")
        ax.set_ylabel("FNMR")
        ax.set_xlim(left=0.0)
        ax.set_ylim(bottom=0.0)
        ax.grid(True, linewidth=0.4, alpha=0.5)
        if len(curves) > 1:
            ax.legend()
        fig.tight_layout()
        fig.savefig(output, format="svg", metadata={"Date": None})
        plt.close(fig)
        logger.info("EDC plot written path=%s curves=%s", output, len(curves))
        return output
