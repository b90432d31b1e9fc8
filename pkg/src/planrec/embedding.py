"""Action vector representations: skip-gram training over a code tree.

Actions are treated as words and plans as sentences.  The conditional
probability of an output action given a center action is a product of
sigmoids along the output action's root-to-leaf path in a frequency-built
binary tree, so the distribution over the vocabulary is normalized by
construction.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass

import numpy as np

from .corpus import PlanLibrary, Vocabulary
from .errors import (
    CorpusFormatError,
    DegenerateVocabularyError,
    EmptyCorpusError,
    InvalidConfigError,
)


def sigmoid(x):
    """Numerically stable logistic function."""
    return np.exp(-np.logaddexp(0.0, -x))


def log_sigmoid(x):
    """log(sigmoid(x)) without overflow for large negative x."""
    return -np.logaddexp(0.0, -x)


@dataclass(frozen=True)
class HuffmanTree:
    """Per-word root-to-leaf paths through the inner nodes of a code tree.

    ``paths[w]`` lists the inner-node ids visited from the root down to the
    leaf's parent and ``codes[w]`` holds the matching direction signs: +1
    when the step descends into the node's designated child, -1 otherwise.
    """

    paths: tuple[tuple[int, ...], ...]
    codes: tuple[tuple[int, ...], ...]
    inner_count: int


def build_huffman(vocabulary: Vocabulary) -> HuffmanTree:
    """Build a frequency-based prefix-code tree over the vocabulary.

    Ties are broken by (count, token text) for leaves and creation order for
    merged nodes, so construction is deterministic.
    """
    n = len(vocabulary)
    if n < 2:
        raise DegenerateVocabularyError(
            f"need at least 2 actions to build a code tree, got {n}"
        )
    # Heap entries: (count, kind, key, payload); leaves sort before merged
    # nodes on equal counts, and leaves among themselves by token text.
    heap: list[tuple[int, int, str | int, tuple[str, int]]] = [
        (count, 0, token, ("leaf", wid))
        for wid, (token, count) in enumerate(zip(vocabulary.tokens, vocabulary.counts))
    ]
    heapq.heapify(heap)
    # parent[node] = (inner id, sign); nodes keyed as ("leaf", wid) / ("inner", nid)
    parent: dict[tuple[str, int], tuple[int, int]] = {}
    next_inner = 0
    while len(heap) > 1:
        c1, _, _, first = heapq.heappop(heap)
        c2, _, _, second = heapq.heappop(heap)
        nid = next_inner
        next_inner += 1
        parent[first] = (nid, +1)  # first-popped child is the designated one
        parent[second] = (nid, -1)
        heapq.heappush(heap, (c1 + c2, 1, nid, ("inner", nid)))
    paths = []
    codes = []
    for wid in range(n):
        node: tuple[str, int] = ("leaf", wid)
        rev_path: list[int] = []
        rev_code: list[int] = []
        while node in parent:
            nid, sign = parent[node]
            rev_path.append(nid)
            rev_code.append(sign)
            node = ("inner", nid)
        paths.append(tuple(reversed(rev_path)))
        codes.append(tuple(reversed(rev_code)))
    return HuffmanTree(paths=tuple(paths), codes=tuple(codes), inner_count=next_inner)


@dataclass(frozen=True)
class TrainConfig:
    dim: int = 64
    window: int = 3
    epochs: int = 5
    learning_rate: float = 0.025
    seed: int = 0

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise InvalidConfigError(f"dim must be >= 1, got {self.dim}")
        if self.window < 1:
            raise InvalidConfigError(f"window must be >= 1, got {self.window}")
        if self.epochs < 1:
            raise InvalidConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.learning_rate <= 0:
            raise InvalidConfigError(
                f"learning rate must be > 0, got {self.learning_rate}"
            )


@dataclass
class EmbeddingModel:
    """Trained action vectors plus the code tree they were trained against.

    ``input_vectors`` holds one row per action; ``inner_vectors`` one row per
    inner tree node.  A finished model is immutable by convention and safe to
    share across threads.
    """

    vocabulary: Vocabulary
    tree: HuffmanTree
    dim: int
    window: int
    input_vectors: np.ndarray
    inner_vectors: np.ndarray

    def _check_id(self, action_id: int) -> None:
        if not 0 <= action_id < len(self.vocabulary):
            raise IndexError(f"action id {action_id} out of range")


def log_prob(model: EmbeddingModel, output: int, center: int) -> float:
    """log p(output | center): summed log-sigmoids along the output's path."""
    model._check_id(output)
    model._check_id(center)
    path = model.tree.paths[output]
    code = np.asarray(model.tree.codes[output], dtype=np.float64)
    z = code * (model.inner_vectors[list(path)] @ model.input_vectors[center])
    return float(log_sigmoid(z).sum())


def predict_distribution(model: EmbeddingModel, center: int) -> np.ndarray:
    """Probability of every vocabulary action given a center action."""
    model._check_id(center)
    scores = model.inner_vectors @ model.input_vectors[center]
    probs = np.empty(len(model.vocabulary))
    for wid, (path, code) in enumerate(zip(model.tree.paths, model.tree.codes)):
        z = np.asarray(code, dtype=np.float64) * scores[list(path)]
        probs[wid] = np.exp(log_sigmoid(z).sum())
    return probs


def iter_window_pairs(length: int, window: int):
    """Yield (center, context) position pairs, truncated at the boundaries."""
    for t in range(length):
        for j in range(-window, window + 1):
            if j == 0:
                continue
            ctx = t + j
            if 0 <= ctx < length:
                yield t, ctx


def train_skipgram(library: PlanLibrary, config: TrainConfig) -> EmbeddingModel:
    """SGD ascent on the average log probability of in-window context actions.

    Windows never cross plan boundaries.  The learning rate decays linearly
    from the configured value to 1e-4 of it across all (epoch, position)
    steps.  Training is single-threaded and bit-reproducible for a fixed
    seed.
    """
    vocab = library.vocabulary
    n = len(vocab)
    if not library.plans:
        raise EmptyCorpusError("cannot train on an empty library")
    if n < 2:
        raise DegenerateVocabularyError(
            f"need at least 2 actions to train, got {n}"
        )
    tree = build_huffman(vocab)
    rng = np.random.default_rng(config.seed)
    dim = config.dim
    input_vectors = (rng.random((n, dim)) - 0.5) / dim
    inner_vectors = np.zeros((tree.inner_count, dim))

    paths = [np.asarray(p, dtype=np.intp) for p in tree.paths]
    codes = [np.asarray(c, dtype=np.float64) for c in tree.codes]

    total_steps = config.epochs * sum(len(p) for p in library.plans)
    lr0 = config.learning_rate
    lr_end = 1e-4 * lr0
    step = 0
    for _ in range(config.epochs):
        for plan in library.plans:
            length = len(plan)
            for t in range(length):
                lr = lr0 if total_steps <= 1 else (
                    lr0 + (lr_end - lr0) * (step / (total_steps - 1))
                )
                step += 1
                center_vec = input_vectors[plan[t]]
                for j in range(-config.window, config.window + 1):
                    ctx = t + j
                    if j == 0 or ctx < 0 or ctx >= length:
                        continue
                    path = paths[plan[ctx]]
                    code = codes[plan[ctx]]
                    rows = inner_vectors[path]
                    z = code * (rows @ center_vec)
                    # d/dz log sigmoid(code*z') at z' = rows @ center_vec
                    g = lr * code * sigmoid(-z)
                    inner_vectors[path] += np.outer(g, center_vec)
                    center_vec += g @ rows
    return EmbeddingModel(
        vocabulary=vocab,
        tree=tree,
        dim=dim,
        window=config.window,
        input_vectors=input_vectors,
        inner_vectors=inner_vectors,
    )


def corpus_log_likelihood(model: EmbeddingModel, library: PlanLibrary) -> float:
    """Average in-window log probability of the corpus under the model."""
    total = 0.0
    words = 0
    for plan in library.plans:
        words += len(plan)
        for t, ctx in iter_window_pairs(len(plan), model.window):
            total += log_prob(model, plan[ctx], plan[t])
    return total / words


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------

MODEL_FORMAT_VERSION = 1


def model_to_json(model: EmbeddingModel) -> str:
    doc = {
        "format_version": MODEL_FORMAT_VERSION,
        "dim": model.dim,
        "window": model.window,
        "vocab": [
            {"token": t, "count": c}
            for t, c in zip(model.vocabulary.tokens, model.vocabulary.counts)
        ],
        "input_vectors": model.input_vectors.tolist(),
        "inner_vectors": model.inner_vectors.tolist(),
        "paths": [list(p) for p in model.tree.paths],
        "codes": [list(c) for c in model.tree.codes],
    }
    return json.dumps(doc)


def model_from_json(text: str) -> EmbeddingModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorpusFormatError(f"model file is not valid JSON: {exc}") from None
    version = doc.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise CorpusFormatError(f"unsupported model format version {version!r}")
    tokens = tuple(entry["token"] for entry in doc["vocab"])
    counts = tuple(entry["count"] for entry in doc["vocab"])
    vocab = Vocabulary(
        tokens=tokens, counts=counts, ids={t: i for i, t in enumerate(tokens)}
    )
    tree = HuffmanTree(
        paths=tuple(tuple(p) for p in doc["paths"]),
        codes=tuple(tuple(c) for c in doc["codes"]),
        inner_count=len(tokens) - 1,
    )
    return EmbeddingModel(
        vocabulary=vocab,
        tree=tree,
        dim=doc["dim"],
        window=doc["window"],
        input_vectors=np.asarray(doc["input_vectors"], dtype=np.float64),
        inner_vectors=np.asarray(doc["inner_vectors"], dtype=np.float64),
    )


def save_model(model: EmbeddingModel, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(model_to_json(model))


def load_model(path: str) -> EmbeddingModel:
    with open(path, encoding="utf-8") as fh:
        return model_from_json(fh.read())
