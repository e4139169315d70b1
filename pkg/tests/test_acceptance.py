"""Statistical trends on the standard fixture, all with pinned seeds."""
import numpy as np
import pytest
from scipy import stats

from app.evaluation import default_grid, edc_curve, pair_scores, pauc, verification_accuracy
from app.model.network import Model
from app.pruning.masks import Criterion, Granularity
from app.scoring.drift import batch_score
from app.services.embedding_service import EmbeddingService
from app.services.pruning_service import PruningService

FMR = 1e-2


@pytest.fixture(scope="module")
def embedder() -> EmbeddingService:
    return EmbeddingService(artifacts=None, datasets=None, tables=None, threads=None)


@pytest.fixture(scope="module")
def pruner() -> PruningService:
    return PruningService(artifacts=None)


def accuracy(embedder, model: Model, dataset, pairs) -> float:
    scores = pair_scores(embedder.embed_samples(model, dataset.samples()), pairs)
    return verification_accuracy(scores[pairs.genuine], scores[~pairs.genuine])[0]


class TestUtilityTrend:
    @pytest.fixture(scope="class")
    def qualities(self, standard_model, standard_dataset, pruner):
        pruned, _ = pruner.prune_model(standard_model, 0.4, Criterion.L1_MAGNITUDE, Granularity.UNSTRUCTURED)
        records = batch_score(standard_model, pruned, standard_dataset.samples())
        return {r.sample_id: r.quality for r in records}

    def test_quality_follows_degradation(self, qualities, standard_dataset):
        q = [qualities[i] for i in standard_dataset.ids]
        assert stats.spearmanr(q, -standard_dataset.sigmas).statistic >= 0.4

    def test_quality_order_beats_random_order(self, qualities, standard_model, standard_dataset, standard_pairs, embedder):
        embeddings = embedder.embed_samples(standard_model, standard_dataset.samples())
        grid = [0.0, 0.3]
        ordered = edc_curve(embeddings, standard_pairs, qualities, FMR, grid).fnmrs[1]

        rng = np.random.default_rng(20)
        ids = list(standard_dataset.ids)
        shuffled = []
        for _ in range(20):
            random_quality = dict(zip(ids, rng.permutation(len(ids)).astype(float)))
            shuffled.append(edc_curve(embeddings, standard_pairs, random_quality, FMR, grid).fnmrs[1])
        assert ordered <= float(np.mean(shuffled))

    def test_reversed_order_is_not_better(self, qualities, standard_model, standard_dataset, standard_pairs, embedder):
        embeddings = embedder.embed_samples(standard_model, standard_dataset.samples())
        grid = default_grid(0.05, 0.3)
        ordered = edc_curve(embeddings, standard_pairs, qualities, FMR, grid)
        reversed_quality = {key: -q for key, q in qualities.items()}
        reversed_curve = edc_curve(embeddings, standard_pairs, reversed_quality, FMR, grid)
        assert not np.all(np.array(reversed_curve.fnmrs) <= np.array(ordered.fnmrs))
        assert pauc(reversed_curve, 0.3) > pauc(ordered, 0.3)


class TestStrategyOrdering:
    @pytest.fixture(scope="class")
    def baseline(self, standard_model, standard_dataset, standard_pairs, embedder):
        return accuracy(embedder, standard_model, standard_dataset, standard_pairs)

    def pruned_accuracy(self, pruner, embedder, model, dataset, pairs, rho, criterion, granularity, seed=None):
        pruned, _ = pruner.prune_model(model, rho, criterion, granularity, seed)
        return accuracy(embedder, pruned, dataset, pairs)

    def test_moderate_l1_keeps_accuracy(self, baseline, pruner, embedder, standard_model, standard_dataset, standard_pairs):
        acc = self.pruned_accuracy(pruner, embedder, standard_model, standard_dataset, standard_pairs,
                                   0.4, Criterion.L1_MAGNITUDE, Granularity.UNSTRUCTURED)
        assert abs(acc - baseline) <= 0.02

    def test_random_collapses_against_l1(self, pruner, embedder, standard_model, standard_dataset, standard_pairs):
        args = (pruner, embedder, standard_model, standard_dataset, standard_pairs, 0.5)
        l1 = self.pruned_accuracy(*args, Criterion.L1_MAGNITUDE, Granularity.UNSTRUCTURED)
        random = self.pruned_accuracy(*args, Criterion.RANDOM, Granularity.UNSTRUCTURED, seed=1234)
        assert random <= l1 - 0.10

    def test_structured_degrades_with_ratio(self, pruner, embedder, standard_model, standard_dataset, standard_pairs):
        args = (pruner, embedder, standard_model, standard_dataset, standard_pairs)
        light = self.pruned_accuracy(*args, 0.1, Criterion.L1_MAGNITUDE, Granularity.STRUCTURED)
        heavy = self.pruned_accuracy(*args, 0.3, Criterion.L1_MAGNITUDE, Granularity.STRUCTURED)
        assert light >= heavy
