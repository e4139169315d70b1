"""End-to-end run on the standard fixture: synth, prune, embed, score, jvp, edc, verify.

Usage: python scripts/run_pipeline.py [OUT_DIR] [CONFIG]
"""
import sys
from pathlib import Path

PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from app.bootstrap import Container
from app.config.settings import get_settings
from app.core.logging import setup_logging

DEFAULT_CONFIG = PROJECT_ROOT / "config" / "standard_fixture.json"


def pipeline_steps(out: Path, config: Path, ratio: float = 0.4) -> list[list[str]]:
    synth, pruned, embedded, scored = out / "synth", out / "prune", out / "embed", out / "score"
    return [
        ["synth", "--config", str(config), "--out", str(synth)],
        ["prune", "--model", str(synth / "model.pfqm"), "--ratio", str(ratio), "--criterion", "l1", "--out", str(pruned)],
        ["embed", "--model", str(synth / "model.pfqm"), "--inputs", str(synth / "dataset.csv"), "--out", str(embedded)],
        [
            "score", "--model", str(synth / "model.pfqm"), "--pruned", str(pruned / "pruned.pfqm"),
            "--inputs", str(synth / "dataset.csv"), "--out", str(scored),
        ],
        [
            "jvp", "--model", str(synth / "model.pfqm"), "--inputs", str(synth / "dataset.csv"),
            "--pairs", str(synth / "pairs.csv"), "--out", str(out / "jvp"),
        ],
        [
            "edc", "--embeddings", str(embedded / "embeddings.csv"), "--pairs", str(synth / "pairs.csv"),
            "--scores", str(scored / "scores.csv"), "--out", str(out / "edc"),
        ],
        [
            "verify", "--model", str(pruned / "pruned.pfqm"), "--inputs", str(synth / "dataset.csv"),
            "--pairs", str(synth / "pairs.csv"), "--out", str(out / "verify"),
        ],
    ]


def run_pipeline(out: Path, config: Path = DEFAULT_CONFIG) -> int:
    settings = get_settings()
    setup_logging(level=settings.log_level, log_file=settings.log_file)
    gateway = Container(settings).build_gateway()
    for argv in pipeline_steps(out, config):
        code = gateway.run(argv)
        if code != 0:
            print(f"pipeline stopped at {argv[0]} (exit {code})")
            return code
    print(f"pipeline finished; results under {out}")
    return 0


def main() -> None:
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else PROJECT_ROOT / "runs" / "standard"
    config = Path(sys.argv[2]) if len(sys.argv) > 2 else DEFAULT_CONFIG
    sys.exit(run_pipeline(out, config))


if __name__ == "__main__":
    main()
