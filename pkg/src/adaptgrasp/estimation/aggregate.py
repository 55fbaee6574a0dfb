from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Hashable, Sequence

MIN_MODAL_COUNT = 5
CONFIDENCE_SAMPLE_COUNT = 10


class EmptyInput(ValueError):
    pass


@dataclass(frozen=True)
class ModeResult:
    value: float
    count: int
    n: int
    confident: bool


def aggregate_mode(samples: Sequence[Hashable]) -> ModeResult:
    """Most frequent sample; ties go to the smallest value.

    With ten or more samples a modal count below five is flagged as low
    confidence. The value is still returned.
    """
    if len(samples) == 0:
        raise EmptyInput("no samples to aggregate")
    counts = Counter(samples)
    value, count = min(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    n = len(samples)
    confident = not (n >= CONFIDENCE_SAMPLE_COUNT and count < MIN_MODAL_COUNT)
    return ModeResult(value, count, n, confident)
