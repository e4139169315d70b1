import math

import numpy as np
import pytest

from app.core.errors import DimensionMismatch, DriftOutOfRange, EmptySampleSet
from app.evaluation.metrics import cosine_similarity
from app.model.params import apply_mask
from app.pruning.masks import build_mask_l1_global, identity_mask
from app.scoring.drift import (
    angle_cosine_from_drift,
    batch_score,
    drift,
    embedding_distance,
    quality,
)
from tests.conftest import dense_model, random_mlp

X = np.array([1.0, 0.0], dtype=np.float32)


class TestDrift:
    def test_identity_mask_is_exactly_zero(self):
        model = random_mlp([6, 10, 4], seed=0)
        pruned = apply_mask(model, identity_mask(model))
        x = np.random.default_rng(0).normal(size=6).astype(np.float32)
        assert drift(model, pruned, x) == 0.0

    def test_antipodal(self):
        assert drift(dense_model(np.eye(2)), dense_model(-np.eye(2)), X) == 2.0

    def test_orthogonal(self):
        value = drift(dense_model(np.eye(2)), dense_model([[0.0, 1.0], [1.0, 0.0]]), X)
        assert value == pytest.approx(math.sqrt(2), abs=1e-7)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            drift(dense_model(np.eye(2)), dense_model(np.ones((3, 2))), X)

    def test_distance_shapes(self):
        with pytest.raises(DimensionMismatch):
            embedding_distance(np.zeros(2), np.zeros(3))


class TestQuality:
    @pytest.mark.parametrize(
        "d, expected",
        [(0.0, 1.0), (2.0, 0.0), (math.sqrt(2), 1 - math.sqrt(2) / 2)],
    )
    def test_rescaling(self, d, expected):
        assert quality(d) == pytest.approx(expected, abs=1e-12)

    def test_clamps_rounding_overshoot(self):
        assert quality(2.0 + 5e-7) == 0.0

    @pytest.mark.parametrize("d", [-0.1, 2.1, float("nan")])
    def test_out_of_range(self, d):
        with pytest.raises(DriftOutOfRange):
            quality(d)

    @pytest.mark.parametrize("d, expected", [(0.0, 1.0), (1.0, 0.5), (2.0, -1.0)])
    def test_angle_cosine(self, d, expected):
        assert angle_cosine_from_drift(d) == expected

    def test_geometry_over_random_pairs(self):
        rng = np.random.default_rng(2024)
        a = rng.normal(size=(10_000, 8))
        b = rng.normal(size=(10_000, 8))
        a /= np.linalg.norm(a, axis=1, keepdims=True)
        b /= np.linalg.norm(b, axis=1, keepdims=True)
        for u, v in zip(a, b):
            d = embedding_distance(u, v)
            assert 0.0 <= d <= 2.0 + 1e-6
            assert abs(d * d - (2.0 - 2.0 * cosine_similarity(u, v))) <= 1e-5
            assert quality(d) == 1.0 - d / 2.0

    def test_rankings_reverse(self):
        drifts = [0.3, 0.1, 1.7, 0.9]
        qualities = [quality(d) for d in drifts]
        assert list(np.argsort(qualities, kind="stable")) == list(np.argsort(drifts, kind="stable"))[::-1]


class TestBatchScore:
    def test_identity_mask_sample(self):
        model = dense_model(np.eye(2))
        records = batch_score(model, model, [("a", X)])
        assert records[0].drift == 0.0
        assert records[0].quality == 1.0

    def test_order_and_error_isolation(self):
        model = random_mlp([4, 6, 3], seed=3)
        pruned = apply_mask(model, build_mask_l1_global(model, 0.4))
        rng = np.random.default_rng(1)
        samples = [
            ("first", rng.normal(size=4)),
            ("broken", rng.normal(size=5)),
            ("third", rng.normal(size=4)),
        ]
        records = batch_score(model, pruned, samples, rho=0.4, criterion="l1_magnitude")
        assert [r.sample_id for r in records] == ["first", "broken", "third"]
        assert records[1].error.startswith("ShapeMismatch")
        assert records[1].drift is None
        assert records[0].ok and records[2].ok
        assert records[0].rho == 0.4

    def test_empty(self):
        model = dense_model(np.eye(2))
        with pytest.raises(EmptySampleSet):
            batch_score(model, model, [])

    def test_threads_do_not_change_results(self):
        model = random_mlp([5, 12, 4], seed=9)
        pruned = apply_mask(model, build_mask_l1_global(model, 0.5))
        rng = np.random.default_rng(5)
        samples = [(f"s{i}", rng.normal(size=5)) for i in range(64)]
        serial = batch_score(model, pruned, samples, threads=1)
        parallel = batch_score(model, pruned, samples, threads=8)
        assert [r.model_dump() for r in serial] == [r.model_dump() for r in parallel]


class TestDriftTrend:
    def test_mean_drift_grows_with_noise(self, standard_model, standard_dataset):
        pruned = apply_mask(standard_model, build_mask_l1_global(standard_model, 0.4))
        records = batch_score(standard_model, pruned, standard_dataset.samples())
        sigmas = standard_dataset.sigmas
        drifts = np.array([r.drift for r in records])
        means = [drifts[sigmas == level].mean() for level in sorted(set(sigmas.tolist()))]
        assert all(b >= a for a, b in zip(means, means[1:]))
        assert means[-1] > means[0]
