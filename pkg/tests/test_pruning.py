import numpy as np
import pytest
from scipy import stats

from app.core.errors import LengthMismatch, RhoOutOfRange, UnsupportedTopology, UsageError
from app.model import layers as L
from app.model.network import Model, forward
from app.model.params import apply_mask, param_vector_view
from app.pruning.masks import (
    Criterion,
    PruneMask,
    build_mask,
    build_mask_l1_global,
    build_mask_random,
    check_mask_length,
    identity_mask,
    partial_fisher_yates,
    prune_count,
    sparsity,
)
from app.pruning.structured import StructuredPlan, apply_structured, build_structured_plan
from tests.conftest import dense_model, random_mlp

RATIOS = [round(0.1 * i, 1) for i in range(1, 10)]


def six_param_model() -> Model:
    return dense_model([[0.5, -0.1], [0.3, -0.7]], bias=[0.0, 0.2])


class TestL1Global:
    def test_full_sort_oracle(self):
        mask = build_mask_l1_global(six_param_model(), 0.5)
        np.testing.assert_array_equal(mask.bits, [1, 0, 1, 1, 0, 0])
        assert mask.tau == pytest.approx(0.2, abs=1e-7)
        assert mask.criterion == Criterion.L1_MAGNITUDE

    def test_tiny_ratio_prunes_nothing(self):
        mask = build_mask_l1_global(six_param_model(), 1e-9)
        assert mask.count_zeros() == 0
        assert mask.tau is None

    def test_tie_broken_by_index(self):
        model = dense_model([[0.2], [-0.2]], bias=[0.2, 0.5])
        mask = build_mask_l1_global(model, 0.25)
        np.testing.assert_array_equal(mask.bits, [0, 1, 1, 1])

    @pytest.mark.parametrize("rho", [0.0, 1.0, -0.1, 1.5])
    def test_ratio_range(self, rho):
        with pytest.raises(RhoOutOfRange):
            build_mask_l1_global(six_param_model(), rho)

    def test_exact_count_and_dominance(self):
        for seed in range(50):
            model = random_mlp([5, 8, 4], seed=seed)
            values = np.abs(param_vector_view(model).values.astype(np.float64))
            for rho in RATIOS:
                mask = build_mask_l1_global(model, rho)
                assert mask.count_zeros() == prune_count(rho, mask.n) == int(np.floor(rho * mask.n + 0.5))
                pruned, kept = values[mask.bits == 0], values[mask.bits == 1]
                assert pruned.max() <= kept.min()
                assert pruned.max() == mask.tau

    def test_existing_zeros_go_first(self):
        model = dense_model([[0.0, 3.0], [2.0, 0.0]], bias=[1.0, 4.0])
        mask = build_mask_l1_global(model, 0.3)
        np.testing.assert_array_equal(np.flatnonzero(mask.bits == 0), [0, 3])


class TestRandom:
    def test_count(self):
        assert build_mask_random(six_param_model(), 0.5, seed=42).count_zeros() == 3

    def test_deterministic(self):
        a = build_mask_random(six_param_model(), 0.5, seed=42)
        b = build_mask_random(six_param_model(), 0.5, seed=42)
        assert a.bits.tobytes() == b.bits.tobytes()
        assert a.seed == 42

    def test_seeds_differ(self):
        assert not np.array_equal(partial_fisher_yates(1000, 500, 1), partial_fisher_yates(1000, 500, 2))

    def test_seed_required(self):
        with pytest.raises(UsageError):
            build_mask(six_param_model(), 0.5, Criterion.RANDOM)

    def test_exact_count_over_ratios(self):
        model = random_mlp([7, 9, 3], seed=2)
        for rho in RATIOS:
            assert build_mask_random(model, rho, seed=5).count_zeros() == prune_count(rho, model.n_prunable)

    def test_positions_are_uniform(self):
        n, k = 20, 5
        counts = np.zeros(n, dtype=np.int64)
        for seed in range(10_000):
            counts[partial_fisher_yates(n, k, seed)] += 1
        assert counts.sum() == 10_000 * k
        assert stats.chisquare(counts).pvalue > 0.01


class TestMaskHelpers:
    def test_sparsity(self):
        mask = PruneMask(bits=[1, 0, 1, 1, 0, 0], rho=0.5, criterion=Criterion.L1_MAGNITUDE)
        assert sparsity(mask) == 0.5
        assert sparsity(identity_mask(six_param_model())) == 0.0
        model = dense_model(np.ones((2, 4)), bias=[1.0, 1.0])
        assert sparsity(build_mask_random(model, 0.3, seed=9)) == pytest.approx(0.3)

    def test_bits_validated(self):
        with pytest.raises(ValueError):
            PruneMask(bits=[0, 2], rho=0.5, criterion=Criterion.RANDOM)

    def test_length_check(self):
        mask = PruneMask(bits=[1, 0, 1], rho=0.3, criterion=Criterion.L1_MAGNITUDE)
        with pytest.raises(LengthMismatch):
            check_mask_length(mask, six_param_model())


def two_dense_model() -> Model:
    w1 = np.diag([0.1, 5.0, 0.2, 3.0]).astype(np.float32)
    w2 = np.arange(8, dtype=np.float32).reshape(2, 4) + 1.0
    return Model(
        layers=(L.dense(4, 4), L.dense(4, 2, embedding_head=True), L.l2_normalize()),
        params=[[w1, np.zeros(4, np.float32)], [w2, np.zeros(2, np.float32)], []],
        input_shape=(4,),
    )


def zero_masked_equivalent(model: Model, plan: StructuredPlan) -> Model:
    params = [[t.copy() for t in group] for group in model.params]
    for entry in plan.entries:
        params[entry.layer][0][list(entry.removed)] = 0.0
        params[entry.layer][1][list(entry.removed)] = 0.0
        consumer = next(i for i in range(entry.layer + 1, len(model.layers)) if model.layers[i].kind == "dense")
        params[consumer][0][:, list(entry.removed)] = 0.0
    return model.replace_params(params)


class TestStructured:
    def test_row_norm_oracle(self):
        model = two_dense_model()
        plan = build_structured_plan(model, 0.5)
        assert [(e.layer, e.removed) for e in plan.entries] == [(0, (0, 2))]
        pruned = apply_structured(model, plan)
        assert pruned.params[0][0].shape == (2, 4)
        np.testing.assert_array_equal(pruned.params[1][0], [[2, 4], [6, 8]])
        assert pruned.d == 2

    def test_small_ratio_gives_empty_plan(self):
        model = two_dense_model()
        plan = build_structured_plan(model, 0.1)
        assert plan.is_empty
        assert apply_structured(model, plan) is model

    def test_head_is_exempt(self):
        assert build_structured_plan(dense_model(np.eye(4)), 0.9).is_empty

    def test_equivalent_to_zero_masking(self):
        rng = np.random.default_rng(12)
        for seed in range(10):
            model = random_mlp([6, 10, 8, 4], seed=seed)
            plan = build_structured_plan(model, 0.3)
            reduced = apply_structured(model, plan)
            masked = zero_masked_equivalent(model, plan)
            assert reduced.n_prunable < model.n_prunable
            for _ in range(5):
                x = rng.normal(size=6).astype(np.float32)
                np.testing.assert_allclose(forward(reduced, x), forward(masked, x), atol=1e-5)

    def test_batchnorm_follows_channels(self):
        rng = np.random.default_rng(3)
        model = Model(
            layers=(L.conv2d(1, 4, 3, pad=1), L.batchnorm(4), L.relu(), L.global_avg_pool(),
                    L.dense(4, 3, embedding_head=True), L.l2_normalize()),
            params=[
                [rng.normal(size=(4, 1, 3, 3)), rng.normal(size=4)],
                [np.ones(4), np.zeros(4), np.zeros(4), np.ones(4)],
                [], [],
                [rng.normal(size=(3, 4)), rng.normal(size=3)],
                [],
            ],
            input_shape=(1, 5, 5),
        )
        pruned = apply_structured(model, build_structured_plan(model, 0.5))
        assert pruned.layers[0].out_channels == 2
        assert pruned.layers[1].num_features == 2
        assert pruned.params[4][0].shape == (3, 2)
        forward(pruned, rng.normal(size=(1, 5, 5)))

    def test_removal_without_consumer(self):
        model = two_dense_model()
        plan = StructuredPlan(rho=0.5, entries=({"layer": 1, "removed": (0,), "kept_units": 1},))
        with pytest.raises(UnsupportedTopology):
            apply_structured(model, plan)

    def test_mask_helpers_leave_original_untouched(self):
        model = random_mlp([4, 6, 3], seed=1)
        before = param_vector_view(model).values.copy()
        apply_mask(model, build_mask_l1_global(model, 0.5))
        np.testing.assert_array_equal(param_vector_view(model).values, before)
