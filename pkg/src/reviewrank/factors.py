"""Transform raw review changes into the discretized factor vectors the model consumes."""
from __future__ import annotations

import datetime as dt
import logging
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Sequence

from .binning import BinThresholds, categorize
from .bn import (
    AGE_STATES,
    MERGED,
    PATCHES_STATES,
    REVIEW_STATES,
    SIZE_STATES,
    STATUS_VAR,
    VERDICT_STATES,
)
from .errors import ClockSkewError, DatasetError
from .gerrit import RawChange

logger = logging.getLogger(__name__)

CHANGE_TYPES = ("TroubleReport", "Feature", "Refactoring")
CONFLICT_VALUES = ("No", "Yes")

#: Ordered keyword rules; a message matching none of them is a Feature.
DEFAULT_CHANGE_TYPE_RULES: tuple[tuple[str, tuple[str, ...]], ...] = (
    ("TroubleReport", ("fix", "tr-", "bug", "fault")),
    ("Refactoring", ("refactor", "cleanup", "restructure")),
)

ChangeTypeRules = Sequence[tuple[str, Sequence[str]]]


class RawFactors(NamedTuple):
    age_minutes: float
    size_lines: int
    revision_count: int


@dataclass(frozen=True)
class FactorVector:
    """Discretized factors for one change; outcome present iff the change is closed.

    The trailing raw readings are carried for re-binning at training time and
    are excluded from equality: two vectors agree when their categorical
    content does.
    """

    change_id: str
    age_cat: str
    size_cat: str
    patches_cat: str
    test_verdict: str
    peer_review: str
    change_type: str
    merge_conflict: str
    outcome: str | None = None
    age_minutes: float | None = field(default=None, compare=False)
    size_lines: int | None = field(default=None, compare=False)
    revision_count: int | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        checks = (
            ("age_cat", self.age_cat, AGE_STATES),
            ("size_cat", self.size_cat, SIZE_STATES),
            ("patches_cat", self.patches_cat, PATCHES_STATES),
            ("test_verdict", self.test_verdict, VERDICT_STATES),
            ("peer_review", self.peer_review, REVIEW_STATES),
            ("change_type", self.change_type, CHANGE_TYPES),
            ("merge_conflict", self.merge_conflict, CONFLICT_VALUES),
        )
        for name, value, allowed in checks:
            if value not in allowed:
                raise DatasetError(f"{name}={value!r} is not one of {allowed}")
        if self.outcome is not None and self.outcome not in ("merged", "abandoned"):
            raise DatasetError(f"outcome={self.outcome!r} must be merged, abandoned, or absent")

    @property
    def has_raw_values(self) -> bool:
        return None not in (self.age_minutes, self.size_lines, self.revision_count)


def classify_change_type(message: str, rules: ChangeTypeRules = DEFAULT_CHANGE_TYPE_RULES) -> str:
    """Keyword classification of a commit message, case-insensitive.

    When keywords of several types match, the highest-priority type wins
    (TroubleReport > Feature > Refactoring); nothing matching is a Feature.
    """
    text = message.lower()
    matched = {
        change_type
        for change_type, keywords in rules
        if any(keyword.lower() in text for keyword in keywords)
    }
    for change_type in CHANGE_TYPES:
        if change_type in matched:
            return change_type
    return "Feature"


def vote_label(vote: int) -> str:
    """Render a label vote the way the network states are spelled: +1, 0, -2."""
    return f"{vote:+d}" if vote else "0"


def compute_raw_factors(change: RawChange, now: dt.datetime) -> RawFactors:
    """Raw numeric factors: age in minutes from creation to `now`, diff size, patch count."""
    if now < change.created_at:
        raise ClockSkewError(
            f"change {change.change_id} created at {change.created_at.isoformat()}, "
            f"after reference time {now.isoformat()}"
        )
    age_minutes = (now - change.created_at).total_seconds() / 60.0
    return RawFactors(
        age_minutes=age_minutes,
        size_lines=change.insertions + change.deletions,
        revision_count=change.revision_count,
    )


def merge_conflict_value(change: RawChange) -> str:
    if change.mergeable is None:
        logger.warning(
            "change %s has no mergeable flag; assuming no merge conflict", change.change_id
        )
        return "No"
    return "No" if change.mergeable else "Yes"


def build_factor_vector(
    change: RawChange,
    bins: BinThresholds,
    now: dt.datetime,
    rules: ChangeTypeRules = DEFAULT_CHANGE_TYPE_RULES,
) -> FactorVector:
    """Discretize one change against fitted bins."""
    raw = compute_raw_factors(change, now)
    return FactorVector(
        change_id=change.change_id,
        age_cat=categorize(raw.age_minutes, bins.age_minutes, AGE_STATES),
        size_cat=categorize(raw.size_lines, bins.size_lines, SIZE_STATES),
        patches_cat=categorize(raw.revision_count, bins.revision_count, PATCHES_STATES),
        test_verdict=vote_label(change.verified_label),
        peer_review=vote_label(change.code_review_label),
        change_type=classify_change_type(change.message or change.subject, rules),
        merge_conflict=merge_conflict_value(change),
        outcome=change.status if change.status in ("merged", "abandoned") else None,
        age_minutes=raw.age_minutes,
        size_lines=raw.size_lines,
        revision_count=raw.revision_count,
    )


def evidence_from(vector: FactorVector) -> dict[str, str]:
    """The five in-network factor assignments for inference."""
    return {
        "age": vector.age_cat,
        "size": vector.size_cat,
        "num_patches": vector.patches_cat,
        "test_verdict": vector.test_verdict,
        "peer_review": vector.peer_review,
    }


def training_assignment(vector: FactorVector) -> dict[str, str]:
    """A complete network assignment for a closed change."""
    if vector.outcome is None:
        raise DatasetError(f"change {vector.change_id} is open; no training outcome")
    row = evidence_from(vector)
    row[STATUS_VAR] = vector.outcome
    return row


def outcome_as_number(vector: FactorVector) -> float:
    """merged=1, abandoned=0; the regression target for evaluation."""
    if vector.outcome is None:
        raise DatasetError(f"change {vector.change_id} is open; no outcome to encode")
    return 1.0 if vector.outcome == MERGED else 0.0
