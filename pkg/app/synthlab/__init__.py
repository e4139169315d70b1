"""Desk-scale experiment fixture: synthetic identities and a toy embedding trainer."""
from app.synthlab.generator import SynthConfig, SynthDataset, build_pairs, generate_dataset, sample_id
from app.synthlab.trainer import (
    TrainConfig,
    TrainingRun,
    check_trainable,
    classification_accuracy,
    fit,
    initialize_model,
    loss_and_grads,
    mlp_layers,
    train_toy_model,
)

__all__ = [
    "SynthConfig",
    "SynthDataset",
    "TrainConfig",
    "TrainingRun",
    "build_pairs",
    "check_trainable",
    "classification_accuracy",
    "fit",
    "generate_dataset",
    "initialize_model",
    "loss_and_grads",
    "mlp_layers",
    "sample_id",
    "train_toy_model",
]
