"""Versioned text format for trained model artifacts.

A model document is JSON with fixed top-level fields: version, structure,
cpts, bins, trained_at, training_rows, smoothing_alpha. Probabilities are
decimal literals at full precision, so serialize/deserialize round-trips
bit-exactly. Loaders reject unknown versions outright.
"""
from __future__ import annotations

import datetime as dt
import json
import os
from pathlib import Path

from .binning import BinThresholds, Cuts
from .bn import (
    CategoricalVariable,
    Cpt,
    NetworkStructure,
    ROW_SUM_TOLERANCE,
    TrainedModel,
    validate_model,
)
from .errors import ModelFormatError, ReviewRankError

FORMAT_VERSION = "1"


def _bins_to_doc(bins: BinThresholds | None):
    if bins is None:
        return None
    return {
        "age_minutes": {"lower_cut": bins.age_minutes.lower, "upper_cut": bins.age_minutes.upper},
        "size_lines": {"lower_cut": bins.size_lines.lower, "upper_cut": bins.size_lines.upper},
        "revision_count": {
            "lower_cut": bins.revision_count.lower,
            "upper_cut": bins.revision_count.upper,
        },
        "method": bins.method,
    }


def _bins_from_doc(doc) -> BinThresholds | None:
    if doc is None:
        return None
    try:
        return BinThresholds(
            age_minutes=Cuts(doc["age_minutes"]["lower_cut"], doc["age_minutes"]["upper_cut"]),
            size_lines=Cuts(doc["size_lines"]["lower_cut"], doc["size_lines"]["upper_cut"]),
            revision_count=Cuts(
                doc["revision_count"]["lower_cut"], doc["revision_count"]["upper_cut"]
            ),
            method=doc["method"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"malformed bins section: {exc}") from exc


def serialize_model(model: TrainedModel) -> str:
    """Render a model as its canonical versioned document."""
    doc = {
        "version": FORMAT_VERSION,
        "structure": {
            "variables": [
                {"name": v.name, "states": list(v.states)} for v in model.structure.variables
            ],
            "edges": [list(edge) for edge in model.structure.edges],
        },
        "cpts": [
            {
                "variable": name,
                "parents": list(cpt.parent_order),
                "rows": [
                    {"given": list(key), "p": list(cpt.table[key])}
                    for key in sorted(cpt.table)
                ],
            }
            for name, cpt in sorted(model.cpts.items())
        ],
        "bins": _bins_to_doc(model.bins),
        "trained_at": model.trained_at.isoformat(),
        "training_rows": model.training_rows,
        "smoothing_alpha": model.smoothing_alpha,
    }
    return json.dumps(doc, indent=2) + "\n"


def deserialize_model(document: str) -> TrainedModel:
    """Parse and validate a model document; raises ModelFormatError on any defect."""
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"model document is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ModelFormatError("model document must be a JSON object")
    version = doc.get("version")
    if version != FORMAT_VERSION:
        raise ModelFormatError(
            f"unsupported model format version {version!r} (expected {FORMAT_VERSION!r})"
        )
    try:
        structure = NetworkStructure(
            variables=tuple(
                CategoricalVariable(v["name"], tuple(v["states"]))
                for v in doc["structure"]["variables"]
            ),
            edges=tuple((p, c) for p, c in doc["structure"]["edges"]),
        )
        cpts: dict[str, Cpt] = {}
        for entry in doc["cpts"]:
            table: dict[tuple[str, ...], tuple[float, ...]] = {}
            for row in entry["rows"]:
                key = tuple(row["given"])
                probs = tuple(float(p) for p in row["p"])
                if abs(sum(probs) - 1.0) > ROW_SUM_TOLERANCE:
                    raise ModelFormatError(
                        f"CPT row for {entry['variable']!r} given {key} sums to "
                        f"{sum(probs)!r}, not 1"
                    )
                table[key] = probs
            cpts[entry["variable"]] = Cpt(entry["variable"], tuple(entry["parents"]), table)
        model = TrainedModel(
            structure=structure,
            cpts=cpts,
            bins=_bins_from_doc(doc.get("bins")),
            trained_at=dt.datetime.fromisoformat(doc["trained_at"]),
            training_rows=int(doc["training_rows"]),
            smoothing_alpha=float(doc["smoothing_alpha"]),
        )
    except ModelFormatError:
        raise
    except ReviewRankError as exc:
        raise ModelFormatError(f"model document violates invariants: {exc}") from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"malformed model document: {exc!r}") from exc
    try:
        validate_model(model)
    except ReviewRankError as exc:
        raise ModelFormatError(f"model document violates invariants: {exc}") from exc
    return model


def save_model(model: TrainedModel, path: str | Path) -> None:
    """Write atomically: the previous artifact stays intact until the new one is complete."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(serialize_model(model), encoding="utf-8")
    os.replace(tmp, path)


def load_model(path: str | Path) -> TrainedModel:
    return deserialize_model(Path(path).read_text(encoding="utf-8"))
