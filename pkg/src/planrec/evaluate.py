"""Cross-validated accuracy experiments over synthetic corpora.

One experiment generates a corpus, splits it into folds, trains an
embedding model per fold, masks every test plan at each hide fraction, and
scores how often each recognizer's top-m suggestions cover the hidden
actions.  Every random draw derives from the experiment seed, so a spec
maps to exactly one result table.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .baseline import MatchConfig, match_recognize
from .corpus import (
    MaskSpec,
    Observation,
    PlanLibrary,
    generate_blocks_corpus,
    generate_route_corpus,
    mask_plan,
    split_folds,
)
from .embedding import TrainConfig, train_skipgram
from .errors import InvalidConfigError
from .recognizer import EmConfig, em_recognize

RESULT_HEADER = ("domain", "recognizer", "fold", "xi", "m", "accuracy", "wall_ms")
RECOGNIZERS = ("em", "match", "random")


@dataclass(frozen=True)
class ExperimentSpec:
    """Full description of one experiment; equal specs give equal results."""

    domain: str = "blocks"
    n_plans: int = 500
    n_blocks: int = 8
    n_locations: int = 6
    n_packages: int = 4
    folds: int = 10
    fold_limit: int | None = None
    xi_grid: tuple[float, ...] = (0.05, 0.10, 0.15, 0.20, 0.25)
    m_grid: tuple[int, ...] = (1, 2, 3, 4, 5, 6, 7, 8, 9, 10)
    recognizers: tuple[str, ...] = ("em", "match")
    seed: int = 0
    train: TrainConfig = TrainConfig()
    em: EmConfig = EmConfig()
    match: MatchConfig = MatchConfig()

    def __post_init__(self) -> None:
        if self.domain not in ("blocks", "route"):
            raise InvalidConfigError(f"unknown domain {self.domain!r}")
        if not self.xi_grid or not self.m_grid:
            raise InvalidConfigError("xi and m grids must be non-empty")
        for xi in self.xi_grid:
            if not 0 < xi <= 1:
                raise InvalidConfigError(f"xi must be in (0, 1], got {xi}")
        for m in self.m_grid:
            if m < 1:
                raise InvalidConfigError(f"m must be >= 1, got {m}")
        for name in self.recognizers:
            if name not in RECOGNIZERS:
                raise InvalidConfigError(f"unknown recognizer {name!r}")


@dataclass(frozen=True)
class ResultRow:
    domain: str
    recognizer: str
    fold: int
    xi: float
    m: int
    accuracy: float
    wall_ms: float


@dataclass(frozen=True)
class ExperimentResult:
    rows: tuple[ResultRow, ...]
    n_plans: int
    n_words: int
    n_vocab: int
    skipped_plans: int
    spec: ExperimentSpec = field(repr=False)


def accuracy(per_plan: list[tuple[int, int]]) -> float:
    """Mean over plans of the fraction of holes whose truth was suggested."""
    if not per_plan:
        raise InvalidConfigError("accuracy needs at least one plan")
    for correct, total in per_plan:
        if total < 1:
            raise InvalidConfigError("every plan must have at least one hole")
        if not 0 <= correct <= total:
            raise InvalidConfigError(
                f"correct count {correct} outside [0, {total}]"
            )
    return sum(correct / total for correct, total in per_plan) / len(per_plan)


def corpus_features(library: PlanLibrary) -> tuple[int, int, int]:
    """(number of plans, total action occurrences, vocabulary size)."""
    return (
        len(library.plans),
        sum(len(p) for p in library.plans),
        len(library.vocabulary),
    )


def _derive_seed(*parts: int) -> int:
    return int(np.random.SeedSequence(list(parts)).generate_state(1)[0])


def _generate(spec: ExperimentSpec) -> PlanLibrary:
    seed = _derive_seed(spec.seed, 0)
    if spec.domain == "blocks":
        return generate_blocks_corpus(spec.n_blocks, spec.n_plans, seed)
    return generate_route_corpus(
        spec.n_locations, spec.n_packages, spec.n_plans, seed
    )


def _random_ranking(vocab_size: int, holes, top_m: int, seed: int):
    """Chance-floor recognizer: a fresh uniform shuffle per hole."""
    rng = np.random.default_rng(seed)
    return {
        x: [(int(o), 0.0) for o in rng.permutation(vocab_size)[:top_m]]
        for x in holes
    }


def run_experiment(
    spec: ExperimentSpec, clock=time.perf_counter
) -> ExperimentResult:
    """Run the full sweep described by the spec.

    Each recognition happens once per (recognizer, fold, plan, xi) with the
    largest requested m; smaller m values reuse prefixes of the same
    ranking, so coverage is non-decreasing in m by construction.  Test
    plans containing actions absent from their fold's training vocabulary
    are skipped and counted.  ``clock`` exists so tests can pin wall times.
    """
    library = _generate(spec)
    n_plans, n_words, n_vocab = corpus_features(library)
    folds = split_folds(library, spec.folds, _derive_seed(spec.seed, 1))
    if spec.fold_limit is not None:
        folds = folds[: spec.fold_limit]
    m_top = max(spec.m_grid)

    rows: list[ResultRow] = []
    skipped = 0
    for fold_idx, (train_lib, test_plans) in enumerate(folds):
        model = train_skipgram(
            train_lib, replace(spec.train, seed=_derive_seed(spec.seed, 2, fold_idx))
        )
        train_vocab = train_lib.vocabulary
        encoded = []
        for plan_idx, plan in enumerate(test_plans):
            tokens = library.token_plan(plan)
            if any(tok not in train_vocab for tok in tokens):
                skipped += 1
                continue
            encoded.append(
                (plan_idx, tuple(train_vocab.id_of(tok) for tok in tokens))
            )
        for rec_idx, recognizer in enumerate(spec.recognizers):
            m_eff = min(m_top, len(train_vocab))
            for xi_idx, xi in enumerate(spec.xi_grid):
                per_plan: dict[int, list[tuple[int, int]]] = {
                    m: [] for m in spec.m_grid
                }
                started = clock()
                for plan_idx, plan in encoded:
                    mask_seed = _derive_seed(spec.seed, 3, fold_idx, plan_idx, xi_idx)
                    observation, truth = mask_plan(plan, MaskSpec(xi=xi, seed=mask_seed))
                    run_seed = _derive_seed(
                        spec.seed, 4, rec_idx, fold_idx, plan_idx, xi_idx
                    )
                    suggestions = _suggest(
                        recognizer, spec, model, train_lib, observation, m_eff, run_seed
                    )
                    for m in spec.m_grid:
                        cut = min(m, m_eff)
                        correct = sum(
                            1
                            for x, true_action in truth.items()
                            if any(o == true_action for o, _ in suggestions[x][:cut])
                        )
                        per_plan[m].append((correct, len(truth)))
                wall_ms = (clock() - started) * 1000.0
                for m in spec.m_grid:
                    rows.append(
                        ResultRow(
                            domain=spec.domain,
                            recognizer=recognizer,
                            fold=fold_idx,
                            xi=xi,
                            m=m,
                            accuracy=accuracy(per_plan[m]) if per_plan[m] else 0.0,
                            wall_ms=wall_ms,
                        )
                    )
    return ExperimentResult(
        rows=tuple(rows),
        n_plans=n_plans,
        n_words=n_words,
        n_vocab=n_vocab,
        skipped_plans=skipped,
        spec=spec,
    )


def _suggest(
    recognizer: str,
    spec: ExperimentSpec,
    model,
    train_lib: PlanLibrary,
    observation: Observation,
    m_eff: int,
    run_seed: int,
) -> dict[int, list[tuple[int, float]]]:
    if recognizer == "em":
        config = replace(spec.em, m=m_eff, seed=run_seed, window=model.window)
        return em_recognize(model, observation, config).suggestions
    if recognizer == "match":
        config = replace(spec.match, m=m_eff)
        return match_recognize(train_lib, observation, config)
    return _random_ranking(
        len(train_lib.vocabulary), observation.hole_indices, m_eff, run_seed
    )


# ---------------------------------------------------------------------------
# Report formats
# ---------------------------------------------------------------------------


def result_csv(result: ExperimentResult) -> str:
    """Stable CSV table: one row per (recognizer, fold, xi, m) cell."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RESULT_HEADER)
    for row in result.rows:
        writer.writerow(
            [
                row.domain,
                row.recognizer,
                row.fold,
                f"{row.xi:g}",
                row.m,
                f"{row.accuracy:.6f}",
                f"{row.wall_ms:.3f}",
            ]
        )
    return buf.getvalue()


def result_summary(result: ExperimentResult) -> str:
    """Corpus features and configuration echo as a stable JSON document."""
    spec = result.spec
    doc = {
        "corpus": {
            "domain": spec.domain,
            "plans": result.n_plans,
            "words": result.n_words,
            "vocabulary": result.n_vocab,
        },
        "skipped_plans": result.skipped_plans,
        "config": {
            "folds": spec.folds,
            "fold_limit": spec.fold_limit,
            "xi_grid": list(spec.xi_grid),
            "m_grid": list(spec.m_grid),
            "recognizers": list(spec.recognizers),
            "seed": spec.seed,
            "train": {
                "dim": spec.train.dim,
                "window": spec.train.window,
                "epochs": spec.train.epochs,
                "learning_rate": spec.train.learning_rate,
            },
            "em": {
                "iterations": spec.em.iterations,
                "delta": spec.em.delta,
                "hole_init": spec.em.hole_init,
            },
            "match": {
                "window": spec.match.window,
                "aggregate": spec.match.aggregate,
            },
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def save_results(result: ExperimentResult, csv_path: str, summary_path: str | None = None) -> None:
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(result_csv(result))
    if summary_path is not None:
        with open(summary_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(result_summary(result))
