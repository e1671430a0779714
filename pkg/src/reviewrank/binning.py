"""Tercile discretization of the numeric review factors.

Cut points are nearest-rank percentiles (1-based: the ceil(p*n)-th smallest
value) at 1/3 and 2/3, fitted on training data only. A value equal to a cut
belongs to the lower bin.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import DatasetError

TERCILE_METHOD = "nearest-rank-tercile"


@dataclass(frozen=True)
class Cuts:
    lower: float
    upper: float

    def __post_init__(self) -> None:
        if self.lower > self.upper:
            raise ValueError(f"lower cut {self.lower} exceeds upper cut {self.upper}")


@dataclass(frozen=True)
class BinThresholds:
    age_minutes: Cuts
    size_lines: Cuts
    revision_count: Cuts
    method: str = TERCILE_METHOD


def nearest_rank(values: Sequence[float], fraction: float) -> float:
    ordered = sorted(values)
    index = math.ceil(fraction * len(ordered))
    return ordered[max(index, 1) - 1]


def tercile_cuts(values: Sequence[float], factor: str) -> Cuts:
    if not values:
        raise DatasetError(f"cannot fit bins for {factor!r}: no training values")
    return Cuts(nearest_rank(values, 1 / 3), nearest_rank(values, 2 / 3))


def fit_bins(
    age_minutes: Sequence[float],
    size_lines: Sequence[float],
    revision_count: Sequence[float],
) -> BinThresholds:
    """Fit tercile cut points for the three numeric factors."""
    return BinThresholds(
        age_minutes=tercile_cuts(age_minutes, "age_minutes"),
        size_lines=tercile_cuts(size_lines, "size_lines"),
        revision_count=tercile_cuts(revision_count, "revision_count"),
    )


def categorize(value: float, cuts: Cuts, labels: Sequence[str]) -> str:
    """Map a raw value onto one of three ordered labels; boundaries go low."""
    if value <= cuts.lower:
        return labels[0]
    if value <= cuts.upper:
        return labels[1]
    return labels[2]
