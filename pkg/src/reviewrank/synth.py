"""Synthetic datasets and fixture payloads from a planted ground-truth model.

Rows are drawn by ancestral sampling in topological order, so the empirical
distribution converges to the planted CPTs. Payload emission inverts the ETL
transform: each category is represented by the midpoint of its bin interval
(the half-open top bin uses twice the upper cut), so extracting and
re-discretizing a payload reproduces the source factor vector exactly.
"""
from __future__ import annotations

import datetime as dt
import itertools
import json
import math
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .binning import BinThresholds, Cuts
from .bn import (
    FACTOR_VARS,
    MERGED,
    STATUS_VAR,
    Cpt,
    NetworkStructure,
    structure_from_edges,
)
from .errors import StructureError
from .factors import CHANGE_TYPES, FactorVector

DEFAULT_FIXTURE_BINS = BinThresholds(
    age_minutes=Cuts(120.0, 2880.0),
    size_lines=Cuts(20.0, 200.0),
    revision_count=Cuts(2.0, 5.0),
)

_SUBJECTS = {
    "TroubleReport": "Fix TR-{n}: adjust parser state",
    "Feature": "Add sampling option {n}",
    "Refactoring": "Refactor module m{n} internals",
}


@dataclass(frozen=True)
class PlantedSpec:
    """Ground truth for a synthetic dataset: network, CPTs, side-factor marginals."""

    structure: NetworkStructure
    cpts: dict[str, Cpt]
    n_rows: int
    seed: int
    change_type_weights: Mapping[str, float]
    merge_conflict_yes: float

    def __post_init__(self) -> None:
        missing = set((*FACTOR_VARS, STATUS_VAR)) - set(self.structure.names)
        if missing:
            raise StructureError(
                f"planted structure must carry the standard variables; missing {sorted(missing)}"
            )


def uniform_cpts(structure: NetworkStructure) -> dict[str, Cpt]:
    cpts = {}
    for v in structure.variables:
        uniform = tuple(1.0 / len(v.states) for _ in v.states)
        table = {
            key: uniform
            for key in itertools.product(*structure.parent_domains(v.name))
        }
        cpts[v.name] = Cpt(v.name, structure.parents(v.name), table)
    return cpts


def status_cpt(structure: NetworkStructure, merged_given: Mapping[tuple, float]) -> Cpt:
    """Build the terminal CPT from P(merged | parents) entries."""
    table = {
        tuple(key): (1.0 - p, p) for key, p in merged_given.items()
    }
    return Cpt(STATUS_VAR, structure.parents(STATUS_VAR), table)


def uniform_planted_spec(n_rows: int, seed: int) -> PlantedSpec:
    """Factors carry no signal; merge outcomes are fair coin flips."""
    structure = structure_from_edges(((f, STATUS_VAR) for f in FACTOR_VARS))
    return PlantedSpec(
        structure=structure,
        cpts=uniform_cpts(structure),
        n_rows=n_rows,
        seed=seed,
        change_type_weights={t: 1.0 for t in CHANGE_TYPES},
        merge_conflict_yes=0.2,
    )


def informative_planted_spec(n_rows: int, seed: int) -> PlantedSpec:
    """Size and test verdict strongly determine the outcome."""
    structure = structure_from_edges((("size", STATUS_VAR), ("test_verdict", STATUS_VAR)))
    cpts = uniform_cpts(structure)
    merged_given = {}
    p_by_verdict = {"+1": (0.97, 0.95, 0.92), "0": (0.85, 0.50, 0.15), "-1": (0.08, 0.05, 0.03)}
    for verdict, by_size in p_by_verdict.items():
        for size, p in zip(("Small", "Medium", "Large"), by_size):
            merged_given[(size, verdict)] = p
    cpts[STATUS_VAR] = status_cpt(structure, merged_given)
    return PlantedSpec(
        structure=structure,
        cpts=cpts,
        n_rows=n_rows,
        seed=seed,
        change_type_weights={t: 1.0 for t in CHANGE_TYPES},
        merge_conflict_yes=0.2,
    )


def sample_assignments(
    structure: NetworkStructure,
    cpts: Mapping[str, Cpt],
    n_rows: int,
    rng: random.Random,
) -> list[dict[str, str]]:
    """Ancestral sampling: draw each variable given its already-drawn parents."""
    order = structure.topological_order()
    rows = []
    for _ in range(n_rows):
        world: dict[str, str] = {}
        for name in order:
            cpt = cpts[name]
            key = tuple(world[p] for p in cpt.parent_order)
            states = structure.variable(name).states
            world[name] = rng.choices(states, weights=cpt.table[key])[0]
        rows.append(world)
    return rows


def sample_dataset(spec: PlantedSpec) -> list[FactorVector]:
    """Seeded draw of n_rows factor vectors, outcomes included."""
    rng = random.Random(spec.seed)
    assignments = sample_assignments(spec.structure, spec.cpts, spec.n_rows, rng)
    types = list(spec.change_type_weights)
    weights = [spec.change_type_weights[t] for t in types]
    vectors = []
    for i, world in enumerate(assignments):
        vectors.append(
            FactorVector(
                change_id=f"synthetic-{i:05d}",
                age_cat=world["age"],
                size_cat=world["size"],
                patches_cat=world["num_patches"],
                test_verdict=world["test_verdict"],
                peer_review=world["peer_review"],
                change_type=rng.choices(types, weights=weights)[0],
                merge_conflict="Yes" if rng.random() < spec.merge_conflict_yes else "No",
                outcome=world[STATUS_VAR],
            )
        )
    return vectors


def representative_value(category_index: int, cuts: Cuts) -> float:
    """A raw value discretizing back into the given category: bin midpoints."""
    if category_index == 0:
        return cuts.lower / 2.0
    if category_index == 1:
        if cuts.lower == cuts.upper:
            raise ValueError(f"middle bin of {cuts} is empty")
        return (cuts.lower + cuts.upper) / 2.0
    return cuts.upper * 2.0 if cuts.upper > 0 else 1.0


def representative_count(category_index: int, cuts: Cuts, minimum: int = 0) -> int:
    """Integer representative of a category, clamped inside the bin."""
    value = round(representative_value(category_index, cuts))
    if category_index == 0:
        value = min(max(minimum, value), math.floor(cuts.lower))
    elif category_index == 1:
        value = max(math.floor(cuts.lower) + 1, min(value, math.floor(cuts.upper)))
    else:
        value = max(value, math.floor(cuts.upper) + 1)
    in_bin = (
        value <= cuts.lower
        if category_index == 0
        else cuts.lower < value <= cuts.upper
        if category_index == 1
        else value > cuts.upper
    )
    if value < minimum or not in_bin:
        raise ValueError(f"no integer >= {minimum} represents bin {category_index} of {cuts}")
    return value


def _category_index(label: str, labels: Sequence[str]) -> int:
    return list(labels).index(label)


def fixture_payload(
    vector: FactorVector,
    index: int,
    bins: BinThresholds,
    now: dt.datetime,
    project: str = "demo/project",
    reviewer: str | None = None,
) -> dict:
    """One change payload in the review-server wire format; `index` seasons the message."""
    age_minutes = representative_value(
        _category_index(vector.age_cat, ("Young", "Medium", "Old")), bins.age_minutes
    )
    size = representative_count(
        _category_index(vector.size_cat, ("Small", "Medium", "Large")), bins.size_lines
    )
    patches = representative_count(
        _category_index(vector.patches_cat, ("Low", "Medium", "High")),
        bins.revision_count,
        minimum=1,
    )
    created = now - dt.timedelta(minutes=age_minutes)
    message = _SUBJECTS[vector.change_type].format(n=index)
    revisions = {f"p{j}": {} for j in range(1, patches + 1)}
    current = f"p{patches}"
    revisions[current] = {"commit": {"message": message + "\n"}}
    status = {"merged": "MERGED", "abandoned": "ABANDONED", None: "NEW"}[vector.outcome]
    payload = {
        "id": vector.change_id,
        "project": project,
        "created": created.strftime("%Y-%m-%d %H:%M:%S.%f") + "000",
        "status": status,
        "insertions": size,
        "deletions": 0,
        "current_revision": current,
        "revisions": revisions,
        "labels": {
            "Verified": {"all": [{"value": int(vector.test_verdict)}]},
            "Code-Review": {"all": [{"value": int(vector.peer_review)}]},
        },
        "mergeable": vector.merge_conflict == "No",
        "subject": message,
    }
    if reviewer:
        payload["reviewers"] = {"REVIEWER": [{"username": reviewer}]}
    return payload


def emit_fixture_server_payloads(
    dataset: Sequence[FactorVector],
    bins: BinThresholds = DEFAULT_FIXTURE_BINS,
    now: dt.datetime | None = None,
    project: str = "demo/project",
    reviewer: str | None = None,
) -> list[dict]:
    """Payloads whose ETL round trip reproduces the dataset exactly."""
    if now is None:
        now = dt.datetime.now(dt.timezone.utc)
    return [
        fixture_payload(vector, i, bins, now, project=project, reviewer=reviewer)
        for i, vector in enumerate(dataset)
    ]


def write_fixture_file(path: str | Path, payloads: Sequence[dict]) -> None:
    Path(path).write_text(json.dumps(list(payloads), indent=2) + "\n", encoding="utf-8")
