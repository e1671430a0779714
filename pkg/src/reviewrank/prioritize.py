"""Lexicographic ordering of a reviewer's open requests.

Sort keys, most significant first: merge conflict (No before Yes), change
type (TroubleReport, Feature, Refactoring), merge probability descending,
age descending (older requests risk abandonment), change id ascending. The
chain is total, so the output order is independent of input order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

TYPE_PRIORITY = {"TroubleReport": 0, "Feature": 1, "Refactoring": 2}


@dataclass(frozen=True)
class PrioritizedItem:
    """One open request, annotated for ranking; rank 0 means not yet ranked."""

    change_id: str
    subject: str
    merge_conflict: str
    change_type: str
    merge_probability: float
    age_minutes: float
    degraded: bool = False
    rank: int = 0

    def __post_init__(self) -> None:
        if self.merge_conflict not in ("No", "Yes"):
            raise ValueError(f"merge_conflict must be Yes or No, got {self.merge_conflict!r}")
        if self.change_type not in TYPE_PRIORITY:
            raise ValueError(f"unknown change_type {self.change_type!r}")
        if math.isnan(self.merge_probability) or not 0.0 <= self.merge_probability <= 1.0:
            raise ValueError(
                f"merge_probability must be within [0, 1], got {self.merge_probability!r}"
            )


def _sort_key(item: PrioritizedItem):
    return (
        0 if item.merge_conflict == "No" else 1,
        TYPE_PRIORITY[item.change_type],
        -item.merge_probability,
        -item.age_minutes,
        item.change_id,
    )


def prioritize(items: Sequence[PrioritizedItem]) -> list[PrioritizedItem]:
    """Return the items in priority order with 1-based ranks assigned."""
    for item in items:
        if not 0.0 <= item.merge_probability <= 1.0:
            raise ValueError(
                f"merge_probability out of range for {item.change_id}: "
                f"{item.merge_probability!r}"
            )
    ordered = sorted(items, key=_sort_key)
    return [replace(item, rank=position) for position, item in enumerate(ordered, start=1)]
