from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reviewrank.binning import Cuts, categorize, fit_bins, tercile_cuts
from reviewrank.errors import DatasetError

from .oracles import nearest_rank_percentile


def test_one_through_nine():
    cuts = tercile_cuts(list(range(1, 10)), "size_lines")
    # nearest-rank: ceil(9/3) = 3rd value, ceil(2*9/3) = 6th value
    assert cuts == Cuts(3, 6)
    assert nearest_rank_percentile(range(1, 10), 1 / 3) == 3
    assert nearest_rank_percentile(range(1, 10), 2 / 3) == 6


def test_identical_values_degenerate():
    assert tercile_cuts([7] * 9, "age_minutes") == Cuts(7, 7)


def test_single_value():
    assert tercile_cuts([42], "revision_count") == Cuts(42, 42)


def test_empty_list_names_factor():
    with pytest.raises(DatasetError, match="age_minutes"):
        fit_bins([], [1], [1])
    with pytest.raises(DatasetError, match="revision_count"):
        fit_bins([1], [1], [])


def test_unsorted_input_handled():
    assert tercile_cuts([9, 1, 5, 3, 7, 2, 8, 4, 6], "x") == Cuts(3, 6)


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=200))
@settings(max_examples=100, deadline=None)
def test_cuts_match_oracle_and_are_ordered(values):
    cuts = tercile_cuts(values, "x")
    assert cuts.lower == nearest_rank_percentile(values, 1 / 3)
    assert cuts.upper == nearest_rank_percentile(values, 2 / 3)
    assert cuts.lower <= cuts.upper


def test_inverted_cuts_rejected():
    with pytest.raises(ValueError):
        Cuts(5, 3)


LABELS = ("Small", "Medium", "Large")


def test_categorize_boundaries_go_low():
    cuts = Cuts(3, 6)
    assert categorize(3, cuts, LABELS) == "Small"
    assert categorize(3.0001, cuts, LABELS) == "Medium"
    assert categorize(6, cuts, LABELS) == "Medium"
    assert categorize(6.0001, cuts, LABELS) == "Large"


def test_categorize_examples():
    assert categorize(150.0, Cuts(100, 1000), ("Young", "Medium", "Old")) == "Medium"
    assert categorize(9, Cuts(2, 5), ("Low", "Medium", "High")) == "High"


@given(st.lists(st.integers(0, 1000), min_size=3, max_size=300, unique=True))
@settings(max_examples=100, deadline=None)
def test_three_distinct_values_fill_every_category(values):
    cuts = tercile_cuts(values, "x")
    seen = {categorize(v, cuts, LABELS) for v in values}
    assert seen == set(LABELS)
