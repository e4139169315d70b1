from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from app.config.experiment import ExperimentConfig, load_experiment
from app.model import layers as L
from app.model.network import Model
from app.synthlab.generator import build_pairs, generate_dataset
from app.synthlab.trainer import fit

PROJECT_ROOT = Path(__file__).resolve().parents[1]
GOLDEN = PROJECT_ROOT / "docs" / "golden"
STANDARD_CONFIG = PROJECT_ROOT / "config" / "standard_fixture.json"


def dense_model(weight, bias=None, dtype=np.float32) -> Model:
    """[Dense head, L2Normalize] with the given weights."""
    weight = np.asarray(weight, dtype=dtype)
    n_out, n_in = weight.shape
    bias = np.zeros(n_out, dtype=dtype) if bias is None else np.asarray(bias, dtype=dtype)
    return Model(
        layers=(L.dense(n_in, n_out, embedding_head=True), L.l2_normalize()),
        params=[[weight, bias], []],
        input_shape=(n_in,),
    )


def random_mlp(widths, seed: int, bias_scale: float = 0.1) -> Model:
    """Dense/ReLU chain with Gaussian weights; last dense is the embedding head."""
    rng = np.random.default_rng(seed)
    specs, params = [], []
    pairs = list(zip(widths[:-1], widths[1:]))
    for index, (fan_in, fan_out) in enumerate(pairs):
        last = index == len(pairs) - 1
        specs.append(L.dense(fan_in, fan_out, embedding_head=last))
        params.append([
            rng.normal(0.0, 1.0 / np.sqrt(fan_in), size=(fan_out, fan_in)).astype(np.float32),
            rng.normal(0.0, bias_scale, size=fan_out).astype(np.float32),
        ])
        if not last:
            specs.append(L.relu())
            params.append([])
    specs.append(L.l2_normalize())
    params.append([])
    return Model(layers=tuple(specs), params=params, input_shape=(widths[0],))


@pytest.fixture(scope="session")
def standard_config() -> ExperimentConfig:
    return load_experiment(STANDARD_CONFIG)


@pytest.fixture(scope="session")
def standard_dataset(standard_config):
    return generate_dataset(standard_config.synth)


@pytest.fixture(scope="session")
def standard_pairs(standard_config, standard_dataset):
    return build_pairs(standard_dataset, standard_config.pairs.max_impostors, standard_config.pairs.seed)


@pytest.fixture(scope="session")
def standard_run(standard_config, standard_dataset):
    return fit(standard_dataset, standard_config.train)


@pytest.fixture(scope="session")
def standard_model(standard_run) -> Model:
    return standard_run.model


@pytest.fixture()
def small_experiment() -> dict:
    return {
        "synth": {
            "n_identities": 6,
            "samples_per_identity": 10,
            "input_dim": 8,
            "embedding_dim": 4,
            "noise_levels": [0.0, 0.25, 0.5, 1.0],
            "seed": 11,
        },
        "train": {"arch": [8, 16, 4], "epochs": 5, "lr": 0.05, "batch_size": 16, "scale": 16.0, "seed": 11},
        "pairs": {"max_impostors": 1000, "seed": 3},
    }
