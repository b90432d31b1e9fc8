"""Library window matching, the comparison recognizer.

For every hole, the observation window around it is slid over every
position of every library plan.  Observed slots must match the library
action; holes match anything.  Each library action is then ranked by the
best (or summed) alignment score among its occurrences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Observation, PlanLibrary
from .errors import EmptyLibraryError, InvalidConfigError


@dataclass(frozen=True)
class MatchConfig:
    """Knobs for the window matcher.

    ``window`` is the radius: a window covers that many slots on each side
    of the hole plus the hole itself.  ``aggregate`` picks how scores from
    multiple occurrences of the same action combine.
    """

    window: int = 3
    m: int = 10
    aggregate: str = "max"  # or "sum"

    def __post_init__(self) -> None:
        if self.window < 1:
            raise InvalidConfigError(f"window must be >= 1, got {self.window}")
        if self.m < 1:
            raise InvalidConfigError(f"m must be >= 1, got {self.m}")
        if self.aggregate not in ("max", "sum"):
            raise InvalidConfigError(
                f"aggregate must be 'max' or 'sum', got {self.aggregate!r}"
            )


def match_recognize(
    library: PlanLibrary, observation: Observation, config: MatchConfig
) -> dict[int, list[tuple[int, float]]]:
    """Rank candidate actions for every hole by window alignment.

    For a hole at position x and a candidate plan position p, the alignment
    score counts offsets d in [-window, window] where observation slot x+d
    is a hole (wildcard) or equals the plan action at p+d; offsets falling
    outside either sequence contribute nothing.  Ties break by library
    frequency, then action id.  Returns the top-m (action id, score) list
    per hole.
    """
    if not library.plans:
        raise EmptyLibraryError("cannot match against an empty library")
    vocab_size = len(library.vocabulary)
    counts = np.asarray(library.vocabulary.counts)
    plans = [np.asarray(p, dtype=np.intp) for p in library.plans]
    obs_len = len(observation)
    top_m = min(config.m, vocab_size)

    results: dict[int, list[tuple[int, float]]] = {}
    for x in observation.hole_indices:
        scores = np.zeros(vocab_size)
        for arr in plans:
            length = len(arr)
            occurrence = np.zeros(length)
            for d in range(-config.window, config.window + 1):
                ox = x + d
                if not 0 <= ox < obs_len:
                    continue
                lo = max(0, -d)
                hi = min(length, length - d)
                if lo >= hi:
                    continue
                slot = observation.slots[ox]
                if slot is None:
                    occurrence[lo:hi] += 1.0
                else:
                    occurrence[lo:hi] += arr[lo + d : hi + d] == slot
            if config.aggregate == "max":
                np.maximum.at(scores, arr, occurrence)
            else:
                np.add.at(scores, arr, occurrence)
        ranked = sorted(
            range(vocab_size), key=lambda o: (-scores[o], -counts[o], o)
        )
        results[x] = [(o, float(scores[o])) for o in ranked[:top_m]]
    return results
