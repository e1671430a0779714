"""Code-review request prioritization.

A discrete Bayesian network learned from historical review data predicts
each open change's merge probability; a lexicographic prioritizer orders a
reviewer's open requests by merge-conflict status, change type, and that
probability. Data comes from a Gerrit-compatible review server.
"""

from .binning import BinThresholds, Cuts, fit_bins
from .bn import (
    CategoricalVariable,
    Cpt,
    NetworkStructure,
    TrainedModel,
    default_structure,
    infer_merge_probability,
    joint_probability,
    learn_cpts,
    structure_from_edges,
)
from .evaluation import EvalReport, cross_validate, kfold_split, mae, rmse, roc_auc
from .factors import FactorVector, classify_change_type, compute_raw_factors
from .gerrit import GerritClient, RawChange
from .model_io import deserialize_model, load_model, save_model, serialize_model
from .prioritize import PrioritizedItem, prioritize

__version__ = "0.1.0"

__all__ = [
    "BinThresholds",
    "CategoricalVariable",
    "Cpt",
    "Cuts",
    "EvalReport",
    "FactorVector",
    "GerritClient",
    "NetworkStructure",
    "PrioritizedItem",
    "RawChange",
    "TrainedModel",
    "classify_change_type",
    "compute_raw_factors",
    "cross_validate",
    "default_structure",
    "deserialize_model",
    "fit_bins",
    "infer_merge_probability",
    "joint_probability",
    "kfold_split",
    "learn_cpts",
    "load_model",
    "mae",
    "prioritize",
    "rmse",
    "roc_auc",
    "save_model",
    "serialize_model",
    "structure_from_edges",
]
