"""Estimator-style facade so the model slots into sklearn pipelines.

`TercileDiscretizer` is the fit/transform face of the percentile binning;
`BayesianNetworkClassifier` is the fit/predict face of the network. Both
delegate to the functional core and keep its semantics, including exact
marginalization over factors missing at prediction time.
"""
from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .binning import categorize, fit_bins
from .bn import (
    ABANDONED,
    AGE_STATES,
    MERGED,
    PATCHES_STATES,
    SIZE_STATES,
    STATUS_VAR,
    NetworkStructure,
    default_structure,
    infer_merge_probability,
    learn_cpts,
)

#: Column order the discretizer expects and the label triples it emits.
DISCRETIZER_COLUMNS = (
    ("age_minutes", AGE_STATES),
    ("size_lines", SIZE_STATES),
    ("revision_count", PATCHES_STATES),
)


class TercileDiscretizer(TransformerMixin, BaseEstimator):
    """Maps (age_minutes, size_lines, revision_count) columns onto tercile labels."""

    def fit(self, X, y=None):
        X = np.asarray(X, dtype=float)
        self._check_shape(X)
        self.bins_ = fit_bins(X[:, 0].tolist(), X[:, 1].tolist(), X[:, 2].tolist())
        return self

    def transform(self, X):
        if not hasattr(self, "bins_"):
            raise NotFittedError("TercileDiscretizer.fit must run before transform")
        X = np.asarray(X, dtype=float)
        self._check_shape(X)
        cuts = (self.bins_.age_minutes, self.bins_.size_lines, self.bins_.revision_count)
        out = np.empty(X.shape, dtype=object)
        for column, (cut, (_, labels)) in enumerate(zip(cuts, DISCRETIZER_COLUMNS)):
            for row in range(X.shape[0]):
                out[row, column] = categorize(X[row, column], cut, labels)
        return out

    @staticmethod
    def _check_shape(X) -> None:
        if X.ndim != 2 or X.shape[1] != len(DISCRETIZER_COLUMNS):
            names = ", ".join(name for name, _ in DISCRETIZER_COLUMNS)
            raise ValueError(f"expected a 2d array with columns ({names})")


class BayesianNetworkClassifier(BaseEstimator):
    """Binary merge-outcome classifier backed by the discrete network.

    X is a sequence of factor-state mappings (partial mappings allowed at
    prediction time; missing factors are marginalized). y accepts the string
    outcomes or 0/1 with merged as the positive class.
    """

    def __init__(self, structure: NetworkStructure | None = None, alpha: float = 1.0):
        self.structure = structure
        self.alpha = alpha

    def fit(self, X: Sequence[Mapping[str, str]], y: Sequence):
        structure = self.structure if self.structure is not None else default_structure()
        rows = []
        for x, label in zip(X, y):
            row = dict(x)
            row[STATUS_VAR] = self._outcome_label(label)
            rows.append(row)
        if len(rows) != len(X) or len(X) != len(y):
            raise ValueError("X and y must have equal lengths")
        self.model_ = learn_cpts(rows, structure, self.alpha)
        self.classes_ = np.array([ABANDONED, MERGED])
        return self

    def predict_proba(self, X: Sequence[Mapping[str, str]]) -> np.ndarray:
        if not hasattr(self, "model_"):
            raise NotFittedError("BayesianNetworkClassifier.fit must run before predict")
        merged = np.array(
            [infer_merge_probability(self.model_, dict(x)) for x in X], dtype=float
        )
        return np.column_stack([1.0 - merged, merged])

    def predict(self, X: Sequence[Mapping[str, str]]) -> np.ndarray:
        return self.classes_[self.predict_proba(X).argmax(axis=1)]

    @staticmethod
    def _outcome_label(label) -> str:
        if label in (MERGED, ABANDONED):
            return str(label)
        if label in (0, 1, False, True):
            return MERGED if label else ABANDONED
        raise ValueError(f"outcome label {label!r} is not merged/abandoned or 0/1")
