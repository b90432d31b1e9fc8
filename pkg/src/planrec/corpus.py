"""Plan corpora: file format, synthetic generators, fold splitting, masking.

A corpus file is UTF-8 text with one plan per line, tokens separated by
single spaces.  Lines starting with '#' and blank lines are skipped.
Observation files use the same format with the reserved token "??" marking
unobserved positions, and must contain exactly one observation.
"""

from __future__ import annotations

import random
import string
from dataclasses import dataclass, field

from .errors import (
    CorpusFormatError,
    EmptyCorpusError,
    InvalidConfigError,
    UnknownActionError,
)

HOLE_TOKEN = "??"

#: A plan is a sequence of dense action ids into its owning vocabulary.
Plan = tuple[int, ...]


@dataclass(frozen=True)
class Vocabulary:
    """Dense id space over the action tokens of a corpus.

    Tokens are ordered by first appearance, ids are their positions, and
    counts hold per-token occurrence totals over the whole corpus.
    """

    tokens: tuple[str, ...]
    counts: tuple[int, ...]
    ids: dict[str, int] = field(compare=False)

    @classmethod
    def from_token_plans(cls, token_plans: list[list[str]]) -> "Vocabulary":
        tokens: list[str] = []
        ids: dict[str, int] = {}
        counts: list[int] = []
        for plan in token_plans:
            for tok in plan:
                if tok not in ids:
                    ids[tok] = len(tokens)
                    tokens.append(tok)
                    counts.append(0)
                counts[ids[tok]] += 1
        return cls(tokens=tuple(tokens), counts=tuple(counts), ids=ids)

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.ids

    def id_of(self, token: str) -> int:
        try:
            return self.ids[token]
        except KeyError:
            raise UnknownActionError(f"unknown action {token!r}") from None

    def token_of(self, action_id: int) -> str:
        return self.tokens[action_id]


@dataclass(frozen=True)
class PlanLibrary:
    """A list of plans together with the vocabulary they are encoded in."""

    plans: tuple[Plan, ...]
    vocabulary: Vocabulary

    def token_plan(self, plan: Plan) -> list[str]:
        return [self.vocabulary.token_of(a) for a in plan]


@dataclass(frozen=True)
class Observation:
    """A length-M slot sequence; ``None`` marks an unobserved position."""

    slots: tuple[int | None, ...]

    @property
    def hole_indices(self) -> tuple[int, ...]:
        return tuple(i for i, s in enumerate(self.slots) if s is None)

    def __len__(self) -> int:
        return len(self.slots)


@dataclass(frozen=True)
class MaskSpec:
    """Fraction of actions to hide and the RNG seed that picks them."""

    xi: float
    seed: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.xi <= 1.0:
            raise InvalidConfigError(f"xi must be in [0, 1], got {self.xi}")


def _validate_token(token: str, lineno: int) -> None:
    if token == HOLE_TOKEN:
        raise CorpusFormatError(
            f"line {lineno}: reserved token {HOLE_TOKEN!r} is not allowed in a corpus"
        )


def parse_corpus(text: str) -> PlanLibrary:
    """Parse corpus text into a plan library.

    Raises CorpusFormatError on a reserved "??" token (with line number)
    and EmptyCorpusError when no plan lines remain after skipping comments.
    """
    token_plans: list[list[str]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = stripped.split()
        for tok in tokens:
            _validate_token(tok, lineno)
        token_plans.append(tokens)
    if not token_plans:
        raise EmptyCorpusError("corpus contains no plans")
    vocab = Vocabulary.from_token_plans(token_plans)
    plans = tuple(tuple(vocab.ids[t] for t in p) for p in token_plans)
    return PlanLibrary(plans=plans, vocabulary=vocab)


def serialize_corpus(library: PlanLibrary) -> str:
    lines = [" ".join(library.token_plan(p)) for p in library.plans]
    return "\n".join(lines) + "\n"


def load_corpus(path: str) -> PlanLibrary:
    with open(path, encoding="utf-8") as fh:
        return parse_corpus(fh.read())


def save_corpus(library: PlanLibrary, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_corpus(library))


def parse_observation_tokens(text: str) -> list[str]:
    """Read the single observation line of an observation file.

    Returns raw tokens, with "??" still marking holes.
    """
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        rows.append((lineno, stripped.split()))
    if len(rows) != 1:
        raise CorpusFormatError(
            f"observation file must contain exactly one observation, found {len(rows)}"
        )
    return rows[0][1]


def observation_from_tokens(tokens: list[str], vocabulary: Vocabulary) -> Observation:
    """Encode observation tokens against a vocabulary; "??" becomes a hole."""
    if not tokens:
        raise CorpusFormatError("observation is empty")
    slots: list[int | None] = []
    for tok in tokens:
        if tok == HOLE_TOKEN:
            slots.append(None)
        else:
            slots.append(vocabulary.id_of(tok))
    return Observation(slots=tuple(slots))


def observation_to_tokens(observation: Observation, vocabulary: Vocabulary) -> list[str]:
    return [
        HOLE_TOKEN if s is None else vocabulary.token_of(s) for s in observation.slots
    ]


# ---------------------------------------------------------------------------
# Synthetic domains
# ---------------------------------------------------------------------------


def _block_names(n_blocks: int) -> list[str]:
    if n_blocks <= 26:
        return list(string.ascii_uppercase[:n_blocks])
    return [f"B{i + 1}" for i in range(n_blocks)]


def _random_towers(rng: random.Random, blocks: list[str]) -> list[list[str]]:
    """Random block configuration as towers listed bottom to top."""
    order = blocks[:]
    rng.shuffle(order)
    towers: list[list[str]] = [[order[0]]]
    for block in order[1:]:
        if rng.random() < 0.5:
            towers[-1].append(block)
        else:
            towers.append([block])
    return towers


def _blocks_plan(initial: list[list[str]], goal: list[list[str]]) -> list[str]:
    """Two-phase solution: unstack everything, then build goal towers bottom-up.

    Towers are processed in base-block order so equal problems always yield
    the same plan.
    """
    tokens: list[str] = []
    for tower in sorted(initial, key=lambda t: t[0]):
        for upper, lower in zip(reversed(tower[1:]), reversed(tower[:-1])):
            tokens.append(f"unstack-{upper}-{lower}")
            tokens.append(f"put-down-{upper}")
    for tower in sorted(goal, key=lambda t: t[0]):
        for lower, upper in zip(tower[:-1], tower[1:]):
            tokens.append(f"pick-up-{upper}")
            tokens.append(f"stack-{upper}-{lower}")
    return tokens


def generate_blocks_corpus(n_blocks: int, n_plans: int, seed: int) -> PlanLibrary:
    """Corpus of block-stacking plans for random (initial, goal) problems.

    Trivial problems (both configurations flat on the table) are resampled,
    so every plan has at least one action.
    """
    if n_blocks < 2:
        raise InvalidConfigError(f"n_blocks must be >= 2, got {n_blocks}")
    if n_plans < 1:
        raise InvalidConfigError(f"n_plans must be >= 1, got {n_plans}")
    rng = random.Random(seed)
    blocks = _block_names(n_blocks)
    token_plans: list[list[str]] = []
    while len(token_plans) < n_plans:
        initial = _random_towers(rng, blocks)
        goal = _random_towers(rng, blocks)
        tokens = _blocks_plan(initial, goal)
        if tokens:
            token_plans.append(tokens)
    vocab = Vocabulary.from_token_plans(token_plans)
    plans = tuple(tuple(vocab.ids[t] for t in p) for p in token_plans)
    return PlanLibrary(plans=plans, vocabulary=vocab)


def generate_route_corpus(
    n_locations: int, n_packages: int, n_plans: int, seed: int
) -> PlanLibrary:
    """Corpus of delivery plans: one truck loads, drives, and unloads packages.

    Each plan handles the packages in random order between random origins and
    destinations; packages whose origin equals their destination need no
    actions, and fully trivial problems are resampled.
    """
    if n_locations < 2:
        raise InvalidConfigError(f"n_locations must be >= 2, got {n_locations}")
    if n_packages < 1:
        raise InvalidConfigError(f"n_packages must be >= 1, got {n_packages}")
    if n_plans < 1:
        raise InvalidConfigError(f"n_plans must be >= 1, got {n_plans}")
    rng = random.Random(seed)
    locations = [f"L{i + 1}" for i in range(n_locations)]
    packages = [f"P{i + 1}" for i in range(n_packages)]
    token_plans: list[list[str]] = []
    while len(token_plans) < n_plans:
        truck = rng.choice(locations)
        order = packages[:]
        rng.shuffle(order)
        tokens: list[str] = []
        for pkg in order:
            origin = rng.choice(locations)
            dest = rng.choice(locations)
            if origin == dest:
                continue
            if truck != origin:
                tokens.append(f"drive-{truck}-{origin}")
                truck = origin
            tokens.append(f"load-{pkg}-{origin}")
            tokens.append(f"drive-{origin}-{dest}")
            tokens.append(f"unload-{pkg}-{dest}")
            truck = dest
        if tokens:
            token_plans.append(tokens)
    vocab = Vocabulary.from_token_plans(token_plans)
    plans = tuple(tuple(vocab.ids[t] for t in p) for p in token_plans)
    return PlanLibrary(plans=plans, vocabulary=vocab)


# ---------------------------------------------------------------------------
# Splitting and masking
# ---------------------------------------------------------------------------


def split_folds(
    library: PlanLibrary, k: int, seed: int
) -> list[tuple[PlanLibrary, list[Plan]]]:
    """Shuffle plans and partition them into k near-equal folds.

    Each returned pair holds the union of the other folds as a freshly
    encoded training library and one fold as the test plans.  Test plans
    keep the ids of the *input* library's vocabulary.
    """
    n = len(library.plans)
    if k < 2:
        raise InvalidConfigError(f"fold count must be >= 2, got {k}")
    if k > n:
        raise InvalidConfigError(f"fold count {k} exceeds plan count {n}")
    indices = list(range(n))
    random.Random(seed).shuffle(indices)
    base, extra = divmod(n, k)
    folds: list[list[int]] = []
    start = 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        folds.append(indices[start : start + size])
        start += size
    out = []
    for i in range(k):
        test = [library.plans[j] for j in folds[i]]
        train_token_plans = [
            library.token_plan(library.plans[j])
            for f in range(k)
            if f != i
            for j in folds[f]
        ]
        vocab = Vocabulary.from_token_plans(train_token_plans)
        train_plans = tuple(tuple(vocab.ids[t] for t in p) for p in train_token_plans)
        out.append((PlanLibrary(plans=train_plans, vocabulary=vocab), test))
    return out


def mask_plan(plan: Plan, spec: MaskSpec) -> tuple[Observation, dict[int, int]]:
    """Hide max(1, round(xi * M)) distinct positions of a plan.

    Returns the observation and a map from hidden position to the true
    action id.
    """
    m = len(plan)
    if m < 1:
        raise InvalidConfigError("cannot mask an empty plan")
    n_holes = min(m, max(1, round(spec.xi * m)))
    rng = random.Random(spec.seed)
    positions = sorted(rng.sample(range(m), n_holes))
    truth = {pos: plan[pos] for pos in positions}
    slots: list[int | None] = list(plan)
    for pos in positions:
        slots[pos] = None
    return Observation(slots=tuple(slots)), truth
