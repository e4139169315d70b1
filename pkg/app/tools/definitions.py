"""Command schemas. Property names map to ``--kebab-case`` flags."""
from app.core.types import CommandDefinition, CommandInputSchema


def _path(help_text: str) -> dict:
    return {"type": "path", "help": help_text}


OUT = _path("output directory (created if absent)")
FMR = {"type": "number", "help": "target false match rate (default: settings.default_fmr)"}
MAX_DISCARD = {"type": "number", "help": "upper discard fraction for pAUC (default: settings.pauc_max_discard)"}


COMMAND_DEFINITIONS: list[CommandDefinition] = [
    CommandDefinition(
        name="synth",
        description="generate the synthetic dataset and pairs, train the toy embedding model",
        input_schema=CommandInputSchema(
            properties={
                "config": _path("experiment config JSON"),
                "seed": {"type": "integer", "help": "overrides the generation and training seeds"},
                "out": OUT,
            },
            required=["config", "out"],
        ),
    ),
    CommandDefinition(
        name="prune",
        description="prune a model and write the pruned model plus its mask or plan",
        input_schema=CommandInputSchema(
            properties={
                "model": _path("PFQM model file"),
                "ratio": {"type": "number", "help": "target sparsity in (0, 1)"},
                "criterion": {"type": "string", "enum": ["l1", "random"], "default": "l1"},
                "granularity": {"type": "string", "enum": ["unstructured", "structured"], "default": "unstructured"},
                "seed": {"type": "integer", "help": "required for --criterion random"},
                "out": OUT,
            },
            required=["model", "ratio", "out"],
        ),
    ),
    CommandDefinition(
        name="embed",
        description="embed every sample of a dataset CSV",
        input_schema=CommandInputSchema(
            properties={"model": _path("PFQM model file"), "inputs": _path("dataset CSV"), "out": OUT},
            required=["model", "inputs", "out"],
        ),
    ),
    CommandDefinition(
        name="score",
        description="per-sample drift and quality between a model and its pruned counterpart",
        input_schema=CommandInputSchema(
            properties={
                "model": _path("original PFQM model"),
                "pruned": _path("pruned PFQM model"),
                "inputs": _path("dataset CSV"),
                "out": OUT,
            },
            required=["model", "pruned", "inputs", "out"],
        ),
    ),
    CommandDefinition(
        name="jvp",
        description="validate the drift against its first-order directional-derivative estimate",
        input_schema=CommandInputSchema(
            properties={
                "model": _path("PFQM model file"),
                "ratio": {"type": "number", "help": "L1 pruning ratio (default: settings.jvp_ratio)"},
                "inputs": _path("dataset CSV"),
                "step": {"type": "number", "help": "relative finite-difference step (default: settings.jvp_step)"},
                "pairs": _path("pairs CSV; adds the drift vs jvp pAUC comparison"),
                "fmr": FMR,
                "max_discard": MAX_DISCARD,
                "out": OUT,
            },
            required=["model", "inputs", "out"],
        ),
    ),
    CommandDefinition(
        name="edc",
        description="EDC curve, pAUC and AUC of a quality score",
        input_schema=CommandInputSchema(
            properties={
                "embeddings": _path("embeddings CSV of the verification model"),
                "pairs": _path("pairs CSV"),
                "scores": _path("scores CSV holding the quality column"),
                "fmr": FMR,
                "grid_step": {"type": "number", "help": "discard grid step (default: settings.grid_step)"},
                "grid_max": {"type": "number", "help": "last discard fraction of the grid (default: settings.grid_max)"},
                "max_discard": MAX_DISCARD,
                "no_plot": {"type": "boolean", "help": "skip the SVG figure"},
                "out": OUT,
            },
            required=["embeddings", "pairs", "scores", "out"],
        ),
    ),
    CommandDefinition(
        name="verify",
        description="verification accuracy and FNMR at fixed FMRs",
        input_schema=CommandInputSchema(
            properties={
                "model": _path("PFQM model file"),
                "inputs": _path("dataset CSV"),
                "pairs": _path("pairs CSV"),
                "fmr": {"type": "array", "items": {"type": "number"}, "help": "one or more target FMRs"},
                "out": OUT,
            },
            required=["model", "inputs", "pairs", "out"],
        ),
    ),
    CommandDefinition(
        name="sweep",
        description="pAUC and accuracy over pruning strategies and ratios",
        input_schema=CommandInputSchema(
            properties={
                "model": _path("PFQM model file"),
                "inputs": _path("dataset CSV"),
                "pairs": _path("pairs CSV"),
                "ratios": {"type": "array", "items": {"type": "number"}, "help": "default: settings.sweep_ratios"},
                "fmr": FMR,
                "max_discard": MAX_DISCARD,
                "out": OUT,
            },
            required=["model", "inputs", "pairs", "out"],
        ),
    ),
]
