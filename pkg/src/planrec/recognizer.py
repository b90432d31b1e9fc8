"""Plan completion by expectation-maximization over position weights.

Given a trained embedding model and an observation with holes, we maintain a
weight matrix with one column per plan position and one row per action.
Observed columns are one-hot and stay fixed.  Hole columns are refined by
repeatedly sampling candidate actions, taking a gradient-ascent step on a
weighted window objective, and projecting back to [0, 1].  The final hole
columns rank the candidate actions.

An exhaustive recognizer that enumerates every hole assignment is provided
as the small-instance reference.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .corpus import Observation, Plan
from .embedding import EmbeddingModel, iter_window_pairs, log_prob, log_sigmoid, sigmoid
from .errors import InvalidConfigError, NumericError, TooLargeError

EXHAUSTIVE_CANDIDATE_CAP = 1_000_000


@dataclass
class PositionWeights:
    """Action-by-position weight matrix for one recognition run.

    ``weights`` has shape (vocab size, plan length).  Columns listed in
    ``hole_columns`` are the unobserved positions; every other column is
    one-hot at the observed action and is never modified.
    """

    weights: np.ndarray
    hole_columns: tuple[int, ...]


@dataclass(frozen=True)
class EmConfig:
    """Knobs for the sampling EM loop."""

    iterations: int = 300
    delta: float = 0.1
    m: int = 10
    window: int = 3
    seed: int = 0
    hole_init: str = "uniform"  # or "inverse-length": 1 / plan length

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise InvalidConfigError(
                f"iterations must be >= 1, got {self.iterations}"
            )
        if self.delta <= 0:
            raise InvalidConfigError(f"delta must be > 0, got {self.delta}")
        if self.m < 1:
            raise InvalidConfigError(f"m must be >= 1, got {self.m}")
        if self.window < 1:
            raise InvalidConfigError(f"window must be >= 1, got {self.window}")
        if self.hole_init not in ("uniform", "inverse-length"):
            raise InvalidConfigError(
                f"hole_init must be 'uniform' or 'inverse-length', "
                f"got {self.hole_init!r}"
            )


@dataclass(frozen=True)
class RecognitionResult:
    """Outcome of one recognition: completion, rankings, and diagnostics.

    ``suggestions`` maps each hole position to its top-m (action id, weight)
    pairs, sorted by weight descending with ties broken by action id.  The
    completed plan takes the first suggestion at every hole.
    """

    completed: Plan
    suggestions: dict[int, list[tuple[int, float]]]
    objective: float
    weights: PositionWeights = field(repr=False)


def score_plan(model: EmbeddingModel, plan: Plan) -> float:
    """Unweighted window objective: sum of log p(context | center) pairs."""
    return sum(
        log_prob(model, plan[ctx], plan[t])
        for t, ctx in iter_window_pairs(len(plan), model.window)
    )


def initial_weights(
    vocab_size: int, observation: Observation, hole_init: str = "uniform"
) -> PositionWeights:
    """One-hot observed columns; hole columns at a flat starting value."""
    length = len(observation)
    if hole_init == "uniform":
        fill = 1.0 / vocab_size
    elif hole_init == "inverse-length":
        fill = 1.0 / length
    else:
        raise InvalidConfigError(f"unknown hole_init {hole_init!r}")
    weights = np.zeros((vocab_size, length))
    holes = []
    for pos, slot in enumerate(observation.slots):
        if slot is None:
            weights[:, pos] = fill
            holes.append(pos)
        else:
            weights[slot, pos] = 1.0
    return PositionWeights(weights=weights, hole_columns=tuple(holes))


def weighted_pair_log_prob(
    model: EmbeddingModel,
    weights: PositionWeights,
    k: int,
    j: int,
    actions: np.ndarray,
) -> float:
    """log probability of the pair (k, k+j) with both dots scaled by weights.

    The center vector is scaled by the weight of the action at position k
    and the inner-node vectors by the weight at position k+j, so each path
    dot product picks up the product of the two weights.
    """
    length = len(actions)
    if not 0 <= k < length or j == 0 or not 0 <= k + j < length:
        raise InvalidConfigError(f"pair ({k}, {k + j}) out of range for length {length}")
    center = int(actions[k])
    output = int(actions[k + j])
    a = weights.weights[output, k + j]
    b = weights.weights[center, k]
    path = list(model.tree.paths[output])
    code = np.asarray(model.tree.codes[output], dtype=np.float64)
    s = code * (model.inner_vectors[path] @ model.input_vectors[center])
    return float(log_sigmoid(a * b * s).sum())


def objective(
    model: EmbeddingModel, weights: PositionWeights, actions
) -> float:
    """Weighted window objective over every in-window ordered pair."""
    actions = np.asarray(actions, dtype=np.intp)
    if weights.weights.shape[1] != len(actions):
        raise InvalidConfigError(
            f"weights cover {weights.weights.shape[1]} positions, "
            f"actions have {len(actions)}"
        )
    return sum(
        weighted_pair_log_prob(model, weights, t, ctx - t, actions)
        for t, ctx in iter_window_pairs(len(actions), model.window)
    )


def objective_gradient(
    model: EmbeddingModel, weights: PositionWeights, actions
) -> np.ndarray:
    """Analytic gradient of the weighted objective w.r.t. the weight matrix.

    Only hole columns move, and within a hole column only the row of the
    currently sampled action: the objective touches no other entry.  Pairs
    with both endpoints observed contribute constants and are skipped.
    """
    actions = np.asarray(actions, dtype=np.intp)
    mat = weights.weights
    grad = np.zeros_like(mat)
    holes = set(weights.hole_columns)
    for t, ctx in iter_window_pairs(len(actions), model.window):
        t_open = t in holes
        ctx_open = ctx in holes
        if not t_open and not ctx_open:
            continue
        center = int(actions[t])
        output = int(actions[ctx])
        a = mat[output, ctx]
        b = mat[center, t]
        path = list(model.tree.paths[output])
        code = np.asarray(model.tree.codes[output], dtype=np.float64)
        s = code * (model.inner_vectors[path] @ model.input_vectors[center])
        slope = sigmoid(-a * b * s) * s
        if ctx_open:
            grad[output, ctx] += b * slope.sum()
        if t_open:
            grad[center, t] += a * slope.sum()
    return grad


def project_weights(weights: PositionWeights) -> PositionWeights:
    """Clamp every hole-column entry into [0, 1].

    Clamping is the Euclidean projection onto the box, so the ordering of
    in-range entries is untouched and ascent steps accumulate across
    iterations instead of being rescaled away.  (A per-column min-max
    rescale looks similar but is destructive here: starting from a uniform
    column, the first positive update becomes both the column maximum and,
    via every other entry sitting at the old constant, the minimum --
    collapsing the column to one-hot and freezing the loop.)  Observed
    columns pass through untouched.  Non-finite values indicate a diverged
    update and are rejected.
    """
    mat = weights.weights.copy()
    for x in weights.hole_columns:
        col = mat[:, x]
        if not np.isfinite(col).all():
            raise NumericError(f"non-finite weights in column {x}")
        mat[:, x] = np.clip(col, 0.0, 1.0)
    return PositionWeights(weights=mat, hole_columns=weights.hole_columns)


def sampling_view(weights: PositionWeights) -> np.ndarray:
    """Per-column distributions: each column normalized to sum to 1.

    Hole columns divide by their sum (uniform when the sum is 0); observed
    one-hot columns are already distributions.
    """
    view = weights.weights.copy()
    for x in weights.hole_columns:
        total = view[:, x].sum()
        if total <= 0:
            view[:, x] = 1.0 / view.shape[0]
        else:
            view[:, x] /= total
    return view


def sample_holes(weights: PositionWeights, rng) -> np.ndarray:
    """Draw one action per position: observed copied, holes sampled.

    ``rng`` is a seed or a numpy Generator; each hole draws independently
    from its column of the sampling view.
    """
    rng = np.random.default_rng(rng)
    view = sampling_view(weights)
    vocab_size, length = view.shape
    actions = np.argmax(weights.weights, axis=0).astype(np.intp)
    for x in weights.hole_columns:
        actions[x] = rng.choice(vocab_size, p=view[:, x])
    return actions


def em_recognize(
    model: EmbeddingModel, observation: Observation, config: EmConfig
) -> RecognitionResult:
    """Complete an observation by the sampling EM loop.

    Each iteration samples a full candidate plan from the current weights,
    moves the weights one gradient step up the weighted objective, and
    projects back to [0, 1].  After the final iteration every hole ranks
    the vocabulary by weight; the completion takes each hole's argmax.
    Deterministic for a fixed (model, observation, config).
    """
    vocab_size = len(model.vocabulary)
    if config.window != model.window:
        raise InvalidConfigError(
            f"config window {config.window} does not match "
            f"model window {model.window}"
        )
    if config.m > vocab_size:
        raise InvalidConfigError(
            f"m={config.m} exceeds the vocabulary size {vocab_size}"
        )
    for slot in observation.slots:
        if slot is not None and not 0 <= slot < vocab_size:
            raise IndexError(f"observed action id {slot} out of range")

    weights = initial_weights(vocab_size, observation, config.hole_init)
    if not weights.hole_columns:
        completed = tuple(observation.slots)  # type: ignore[arg-type]
        return RecognitionResult(
            completed=completed,
            suggestions={},
            objective=score_plan(model, completed),
            weights=weights,
        )

    rng = np.random.default_rng(config.seed)
    for _ in range(config.iterations):
        actions = sample_holes(weights, rng)
        grad = objective_gradient(model, weights, actions)
        stepped = PositionWeights(
            weights=weights.weights + config.delta * grad,
            hole_columns=weights.hole_columns,
        )
        weights = project_weights(stepped)

    suggestions: dict[int, list[tuple[int, float]]] = {}
    completed_slots = list(observation.slots)
    for x in weights.hole_columns:
        col = weights.weights[:, x]
        order = np.argsort(-col, kind="stable")
        suggestions[x] = [(int(o), float(col[o])) for o in order[: config.m]]
        completed_slots[x] = suggestions[x][0][0]
    completed = tuple(completed_slots)  # type: ignore[arg-type]
    return RecognitionResult(
        completed=completed,
        suggestions=suggestions,
        objective=objective(model, weights, completed),
        weights=weights,
    )


def exhaustive_recognize(
    model: EmbeddingModel, observation: Observation
) -> tuple[Plan, float]:
    """Try every hole assignment and return the best-scoring completion.

    Ties break toward the lexicographically smallest assignment.  Guarded
    against blowup: vocab_size ** holes must stay within the candidate cap.
    """
    vocab_size = len(model.vocabulary)
    holes = observation.hole_indices
    if vocab_size ** len(holes) > EXHAUSTIVE_CANDIDATE_CAP:
        raise TooLargeError(
            f"{vocab_size} ** {len(holes)} candidates exceed the "
            f"{EXHAUSTIVE_CANDIDATE_CAP} cap"
        )
    slots = list(observation.slots)
    best_plan: Plan | None = None
    best_score = -np.inf
    for assignment in itertools.product(range(vocab_size), repeat=len(holes)):
        for x, action in zip(holes, assignment):
            slots[x] = action
        candidate = tuple(slots)  # type: ignore[arg-type]
        score = score_plan(model, candidate)
        if score > best_score:
            best_score = score
            best_plan = candidate
    assert best_plan is not None
    return best_plan, float(best_score)
