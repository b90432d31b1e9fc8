"""Weighted objective, gradient, projection, sampling, and the EM loop."""

import math

import numpy as np
import pytest

from planrec.corpus import Observation, Vocabulary, parse_corpus
from planrec.embedding import (
    EmbeddingModel,
    TrainConfig,
    build_huffman,
    log_prob,
    train_skipgram,
)
from planrec.errors import InvalidConfigError, NumericError, TooLargeError
from planrec.recognizer import (
    EmConfig,
    PositionWeights,
    em_recognize,
    exhaustive_recognize,
    initial_weights,
    objective,
    objective_gradient,
    project_weights,
    sample_holes,
    sampling_view,
    score_plan,
    weighted_pair_log_prob,
)

# 99th-percentile chi-square critical value for 3 degrees of freedom.
CHI2_99_DF3 = 11.345


def random_model(rng: np.random.Generator, size: int, dim: int = 6) -> EmbeddingModel:
    tokens = tuple(f"w{i}" for i in range(size))
    vocab = Vocabulary(
        tokens=tokens,
        counts=tuple(int(rng.integers(1, 9)) for _ in tokens),
        ids={t: i for i, t in enumerate(tokens)},
    )
    tree = build_huffman(vocab)
    return EmbeddingModel(
        vocabulary=vocab,
        tree=tree,
        dim=dim,
        window=3,
        input_vectors=rng.normal(scale=1.5, size=(size, dim)),
        inner_vectors=rng.normal(scale=1.5, size=(size - 1, dim)),
    )


def random_weights(
    rng: np.random.Generator, model: EmbeddingModel, length: int, holes
) -> tuple[PositionWeights, np.ndarray]:
    """Interior-valued hole columns plus a consistent sampled-action vector."""
    size = len(model.vocabulary)
    mat = np.zeros((size, length))
    actions = rng.integers(0, size, size=length).astype(np.intp)
    for pos in range(length):
        if pos in holes:
            mat[:, pos] = rng.uniform(0.05, 0.95, size=size)
        else:
            mat[actions[pos], pos] = 1.0
    return PositionWeights(weights=mat, hole_columns=tuple(sorted(holes))), actions


def brute_force_objective(model, weights, actions) -> float:
    """Independent re-summation straight from the definitions."""
    total = 0.0
    length = len(actions)
    for k in range(length):
        for j in range(-model.window, model.window + 1):
            if j == 0 or not 0 <= k + j < length:
                continue
            center = actions[k]
            output = actions[k + j]
            a = weights.weights[output, k + j]
            b = weights.weights[center, k]
            for node, code in zip(model.tree.paths[output], model.tree.codes[output]):
                z = code * a * b * float(
                    model.inner_vectors[node] @ model.input_vectors[center]
                )
                total += -math.log1p(math.exp(-z)) if z > -30 else z
    return total


class TestScorePlan:
    def test_single_action_plan_scores_zero(self):
        model = random_model(np.random.default_rng(0), 5)
        assert score_plan(model, (2,)) == 0.0

    def test_zero_inner_vectors_give_coin_flips_per_level(self):
        rng = np.random.default_rng(1)
        model = random_model(rng, 4)
        model.inner_vectors[:] = 0.0
        model.vocabulary = Vocabulary(
            tokens=model.vocabulary.tokens,
            counts=(1, 1, 1, 1),
            ids=model.vocabulary.ids,
        )
        tree = build_huffman(model.vocabulary)
        model.tree = tree
        assert all(len(p) == 2 for p in tree.paths)
        assert score_plan(model, (0, 3)) == pytest.approx(2 * 2 * math.log(0.5))

    def test_matches_double_loop_summation(self):
        rng = np.random.default_rng(2)
        for trial in range(10):
            model = random_model(rng, int(rng.integers(3, 9)))
            plan = tuple(
                int(a)
                for a in rng.integers(0, len(model.vocabulary), int(rng.integers(2, 9)))
            )
            expected = sum(
                log_prob(model, plan[t + j], plan[t])
                for t in range(len(plan))
                for j in range(-model.window, model.window + 1)
                if j != 0 and 0 <= t + j < len(plan)
            )
            assert score_plan(model, plan) == pytest.approx(expected, rel=1e-12)


class TestWeightedPairLogProb:
    def test_unit_weights_reduce_to_the_plain_probability(self):
        rng = np.random.default_rng(3)
        model = random_model(rng, 7)
        weights, actions = random_weights(rng, model, 5, holes=())
        for k, j in [(0, 1), (2, -1), (1, 3)]:
            assert weighted_pair_log_prob(model, weights, k, j, actions) == (
                pytest.approx(log_prob(model, int(actions[k + j]), int(actions[k])), rel=1e-12)
            )

    def test_zero_weight_gives_coin_flips(self):
        rng = np.random.default_rng(4)
        model = random_model(rng, 6)
        weights, actions = random_weights(rng, model, 4, holes=(1,))
        weights.weights[:, 1] = 0.0
        path_len = len(model.tree.paths[int(actions[1])])
        assert weighted_pair_log_prob(model, weights, 0, 1, actions) == (
            pytest.approx(path_len * math.log(0.5))
        )

    def test_half_weights_match_prescaled_vectors(self):
        rng = np.random.default_rng(5)
        model = random_model(rng, 6)
        weights, actions = random_weights(rng, model, 4, holes=(1, 2))
        weights.weights[:, 1] = 0.5
        weights.weights[:, 2] = 0.5
        scaled = EmbeddingModel(
            vocabulary=model.vocabulary,
            tree=model.tree,
            dim=model.dim,
            window=model.window,
            input_vectors=model.input_vectors,
            inner_vectors=model.inner_vectors * 0.25,
        )
        assert weighted_pair_log_prob(model, weights, 1, 1, actions) == (
            pytest.approx(log_prob(scaled, int(actions[2]), int(actions[1])), rel=1e-12)
        )

    def test_out_of_range_pairs_rejected(self):
        rng = np.random.default_rng(6)
        model = random_model(rng, 5)
        weights, actions = random_weights(rng, model, 3, holes=())
        with pytest.raises(InvalidConfigError):
            weighted_pair_log_prob(model, weights, 2, 1, actions)
        with pytest.raises(InvalidConfigError):
            weighted_pair_log_prob(model, weights, 0, 0, actions)


class TestObjective:
    def test_one_hot_weights_reduce_to_score_plan(self):
        rng = np.random.default_rng(7)
        for trial in range(20):
            model = random_model(rng, int(rng.integers(3, 8)))
            length = int(rng.integers(1, 8))
            weights, actions = random_weights(rng, model, length, holes=())
            plan = tuple(int(a) for a in actions)
            assert abs(objective(model, weights, actions) - score_plan(model, plan)) < 1e-12

    def test_matches_brute_force_on_random_inputs(self):
        rng = np.random.default_rng(8)
        for trial in range(10):
            model = random_model(rng, int(rng.integers(4, 9)))
            length = int(rng.integers(2, 8))
            holes = set(
                int(h) for h in rng.choice(length, size=min(2, length), replace=False)
            )
            weights, actions = random_weights(rng, model, length, holes)
            assert objective(model, weights, actions) == pytest.approx(
                brute_force_objective(model, weights, actions), rel=1e-9
            )

    def test_length_mismatch_rejected(self):
        rng = np.random.default_rng(9)
        model = random_model(rng, 5)
        weights, actions = random_weights(rng, model, 4, holes=())
        with pytest.raises(InvalidConfigError):
            objective(model, weights, actions[:3])


class TestObjectiveGradient:
    def test_matches_central_finite_differences(self):
        """Every hole entry: analytic vs numeric slope, tight tolerance."""
        rng = np.random.default_rng(10)
        h = 1e-5
        for trial in range(25):
            model = random_model(rng, int(rng.integers(4, 8)), dim=4)
            length = int(rng.integers(2, 7))
            n_holes = int(rng.integers(1, min(3, length) + 1))
            holes = set(int(x) for x in rng.choice(length, size=n_holes, replace=False))
            weights, actions = random_weights(rng, model, length, holes)
            grad = objective_gradient(model, weights, actions)
            for x in holes:
                for row in range(len(model.vocabulary)):
                    bumped = weights.weights.copy()
                    bumped[row, x] += h
                    up = objective(
                        model, PositionWeights(bumped, weights.hole_columns), actions
                    )
                    bumped[row, x] -= 2 * h
                    down = objective(
                        model, PositionWeights(bumped, weights.hole_columns), actions
                    )
                    numeric = (up - down) / (2 * h)
                    scale = max(1e-8, abs(numeric), abs(grad[row, x]))
                    assert abs(grad[row, x] - numeric) / scale < 1e-4

    def test_zero_when_everything_is_observed(self):
        rng = np.random.default_rng(11)
        model = random_model(rng, 6)
        weights, actions = random_weights(rng, model, 5, holes=())
        assert not objective_gradient(model, weights, actions).any()

    def test_support_is_the_sampled_action_at_each_hole(self):
        rng = np.random.default_rng(12)
        model = random_model(rng, 7)
        weights, actions = random_weights(rng, model, 6, holes=(2, 4))
        grad = objective_gradient(model, weights, actions)
        nonzero = set(zip(*np.nonzero(grad)))
        assert nonzero <= {(int(actions[2]), 2), (int(actions[4]), 4)}

    def test_far_pairs_do_not_affect_hole_gradients(self):
        """Pairs lying entirely outside a hole's window contribute nothing.

        With the hole at position 8 and window 3, no pair involving
        positions 0 or 1 can reach it; editing those actions must leave the
        hole's gradient column bit-identical.
        """
        rng = np.random.default_rng(13)
        model = random_model(rng, 6)
        weights, actions = random_weights(rng, model, 9, holes=(8,))
        before = objective_gradient(model, weights, actions)[:, 8]
        changed = actions.copy()
        changed[0] = (changed[0] + 1) % 6
        changed[1] = (changed[1] + 2) % 6
        mat = weights.weights.copy()
        for pos in (0, 1):
            mat[:, pos] = 0.0
            mat[changed[pos], pos] = 1.0
        after = objective_gradient(
            model, PositionWeights(weights=mat, hole_columns=(8,)), changed
        )[:, 8]
        np.testing.assert_array_equal(before, after)


class TestProjection:
    def test_out_of_range_entries_are_clamped(self):
        weights = PositionWeights(
            weights=np.array([[-1.0], [0.0], [3.0]]), hole_columns=(0,)
        )
        np.testing.assert_allclose(
            project_weights(weights).weights[:, 0], [0.0, 0.0, 1.0]
        )

    def test_in_range_ordering_is_preserved(self):
        weights = PositionWeights(
            weights=np.array([[0.1], [0.7], [5.0], [0.3]]), hole_columns=(0,)
        )
        projected = project_weights(weights).weights[:, 0]
        np.testing.assert_allclose(projected, [0.1, 0.7, 1.0, 0.3])
        np.testing.assert_allclose(
            sampling_view(project_weights(weights))[:, 0],
            np.array([0.1, 0.7, 1.0, 0.3]) / 2.1,
        )

    def test_idempotent_on_in_range_columns(self):
        weights = PositionWeights(
            weights=np.array([[0.0], [0.25], [1.0]]), hole_columns=(0,)
        )
        np.testing.assert_allclose(
            project_weights(weights).weights[:, 0], [0.0, 0.25, 1.0]
        )

    def test_observed_columns_untouched_and_nonfinite_rejected(self):
        mat = np.array([[1.0, 5.0], [0.0, -2.0]])
        weights = PositionWeights(weights=mat, hole_columns=(1,))
        projected = project_weights(weights)
        np.testing.assert_array_equal(projected.weights[:, 0], [1.0, 0.0])
        bad = PositionWeights(
            weights=np.array([[np.inf], [0.0]]), hole_columns=(0,)
        )
        with pytest.raises(NumericError):
            project_weights(bad)


class TestSampling:
    def test_view_columns_are_distributions(self):
        rng = np.random.default_rng(14)
        model = random_model(rng, 8)
        weights, _ = random_weights(rng, model, 6, holes=(0, 3, 5))
        view = sampling_view(project_weights(weights))
        np.testing.assert_allclose(view.sum(axis=0), 1.0, atol=1e-9)

    def test_zero_column_samples_uniformly(self):
        weights = PositionWeights(weights=np.zeros((4, 1)), hole_columns=(0,))
        np.testing.assert_allclose(sampling_view(weights)[:, 0], 0.25)

    def test_observed_positions_copy_the_observation(self):
        mat = np.zeros((5, 3))
        mat[2, 0] = 1.0
        mat[:, 1] = 0.2
        mat[4, 2] = 1.0
        weights = PositionWeights(weights=mat, hole_columns=(1,))
        for seed in range(10):
            actions = sample_holes(weights, seed)
            assert actions[0] == 2 and actions[2] == 4

    def test_one_hot_hole_always_yields_that_action(self):
        mat = np.zeros((5, 1))
        mat[3, 0] = 1.0
        weights = PositionWeights(weights=mat, hole_columns=(0,))
        assert all(sample_holes(weights, seed)[0] == 3 for seed in range(20))

    def test_uniform_hole_passes_a_chi_square_check(self):
        weights = PositionWeights(weights=np.full((4, 1), 0.25), hole_columns=(0,))
        rng = np.random.default_rng(15)
        draws = np.array([sample_holes(weights, rng)[0] for _ in range(10_000)])
        observed = np.bincount(draws, minlength=4)
        expected = len(draws) / 4
        stat = ((observed - expected) ** 2 / expected).sum()
        assert stat < CHI2_99_DF3


class TestEmRecognize:
    @staticmethod
    def trained_model(seed: int = 0):
        text = "a b c d\nb c d a\nc d a b\nd a b c\n" * 5
        library = parse_corpus(text)
        return train_skipgram(library, TrainConfig(dim=8, epochs=3, seed=seed))

    def test_zero_holes_returns_the_observation(self):
        model = self.trained_model()
        obs = Observation(slots=(0, 1, 2))
        result = em_recognize(model, obs, EmConfig(iterations=5, m=2))
        assert result.completed == (0, 1, 2)
        assert result.suggestions == {}
        assert result.objective == pytest.approx(score_plan(model, (0, 1, 2)))

    def test_observed_slots_are_preserved(self):
        model = self.trained_model()
        obs = Observation(slots=(0, None, 2, None))
        result = em_recognize(model, obs, EmConfig(iterations=30, m=3, seed=4))
        assert result.completed[0] == 0 and result.completed[2] == 2
        for pos in (0, 2):
            column = result.weights.weights[:, pos]
            assert column[obs.slots[pos]] == 1.0 and column.sum() == 1.0

    def test_completion_takes_the_top_suggestion(self):
        model = self.trained_model()
        obs = Observation(slots=(None, 1, None, 3))
        result = em_recognize(model, obs, EmConfig(iterations=30, m=4, seed=8))
        for x, ranked in result.suggestions.items():
            assert result.completed[x] == ranked[0][0]
            scores = [w for _, w in ranked]
            assert scores == sorted(scores, reverse=True)

    def test_suggestions_nest_across_m(self):
        model = self.trained_model()
        obs = Observation(slots=(0, None, None, 3))
        small = em_recognize(model, obs, EmConfig(iterations=25, m=2, seed=6))
        large = em_recognize(model, obs, EmConfig(iterations=25, m=4, seed=6))
        for x in small.suggestions:
            assert large.suggestions[x][:2] == small.suggestions[x]

    def test_deterministic(self):
        model = self.trained_model()
        obs = Observation(slots=(None, 1, None))
        config = EmConfig(iterations=40, m=3, seed=21)
        one = em_recognize(model, obs, config)
        two = em_recognize(model, obs, config)
        assert one.completed == two.completed
        assert one.suggestions == two.suggestions
        assert one.objective == two.objective

    def test_window_mismatch_and_oversized_m_rejected(self):
        model = self.trained_model()
        obs = Observation(slots=(0, None))
        with pytest.raises(InvalidConfigError):
            em_recognize(model, obs, EmConfig(window=2))
        with pytest.raises(InvalidConfigError):
            em_recognize(model, obs, EmConfig(m=99))

    def test_inverse_length_initialization(self):
        obs = Observation(slots=(0, None, 1, None))
        weights = initial_weights(8, obs, hole_init="inverse-length")
        np.testing.assert_allclose(weights.weights[:, 1], 0.25)
        uniform = initial_weights(8, obs, hole_init="uniform")
        np.testing.assert_allclose(uniform.weights[:, 1], 0.125)


class TestExhaustiveRecognize:
    def recursive_best(self, model, observation):
        """Second, recursive enumeration used as an independent check."""
        holes = observation.hole_indices
        size = len(model.vocabulary)

        def recurse(idx, slots):
            if idx == len(holes):
                plan = tuple(slots)
                return plan, score_plan(model, plan)
            best = None
            for action in range(size):
                slots[holes[idx]] = action
                candidate = recurse(idx + 1, slots)
                if best is None or candidate[1] > best[1]:
                    best = candidate
            return best

        return recurse(0, list(observation.slots))

    def test_zero_holes(self):
        rng = np.random.default_rng(16)
        model = random_model(rng, 5)
        obs = Observation(slots=(1, 2, 3))
        plan, score = exhaustive_recognize(model, obs)
        assert plan == (1, 2, 3)
        assert score == pytest.approx(score_plan(model, plan))

    def test_two_candidates(self):
        rng = np.random.default_rng(17)
        model = random_model(rng, 2)
        obs = Observation(slots=(0, None))
        plan, score = exhaustive_recognize(model, obs)
        scores = [score_plan(model, (0, a)) for a in range(2)]
        assert score == pytest.approx(max(scores))
        assert plan[1] == int(np.argmax(scores))

    def test_agrees_with_the_recursive_enumerator(self):
        rng = np.random.default_rng(18)
        for trial in range(8):
            model = random_model(rng, int(rng.integers(3, 6)))
            length = int(rng.integers(2, 6))
            slots = [int(a) for a in rng.integers(0, len(model.vocabulary), length)]
            for x in rng.choice(length, size=min(2, length), replace=False):
                slots[int(x)] = None
            obs = Observation(slots=tuple(slots))
            plan, score = exhaustive_recognize(model, obs)
            ref_plan, ref_score = self.recursive_best(model, obs)
            assert score == pytest.approx(ref_score, rel=1e-12)
            assert plan == ref_plan

    def test_guard_against_blowup(self):
        rng = np.random.default_rng(19)
        model = random_model(rng, 12)
        obs = Observation(slots=tuple([None] * 7))
        with pytest.raises(TooLargeError):
            exhaustive_recognize(model, obs)
