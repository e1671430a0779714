"""Discrete Bayesian network over categorical review factors.

The network predicts the terminal ``change_status`` node. Learning fills
conditional probability tables with additively smoothed maximum-likelihood
estimates; inference is exact enumeration (the networks are tiny).

Models are immutable once built: learning returns a fresh ``TrainedModel``
and never mutates one that is being served, so concurrent readers are safe.
"""
from __future__ import annotations

import datetime as dt
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .binning import BinThresholds
from .errors import (
    DatasetError,
    DegenerateEvidenceError,
    EvidenceError,
    StructureError,
)

STATUS_VAR = "change_status"
MERGED = "merged"
ABANDONED = "abandoned"

AGE_STATES = ("Young", "Medium", "Old")
SIZE_STATES = ("Small", "Medium", "Large")
PATCHES_STATES = ("Low", "Medium", "High")
VERDICT_STATES = ("-1", "0", "+1")
REVIEW_STATES = ("-2", "-1", "0", "+1", "+2")
STATUS_STATES = (ABANDONED, MERGED)

#: Variables with these names must carry exactly these state domains.
CANONICAL_DOMAINS: dict[str, tuple[str, ...]] = {
    "age": AGE_STATES,
    "size": SIZE_STATES,
    "num_patches": PATCHES_STATES,
    "test_verdict": VERDICT_STATES,
    "peer_review": REVIEW_STATES,
    STATUS_VAR: STATUS_STATES,
}

FACTOR_VARS = ("age", "size", "num_patches", "test_verdict", "peer_review")

ROW_SUM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class CategoricalVariable:
    """A named variable with an ordered domain of at least two states."""

    name: str
    states: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "states", tuple(self.states))
        if len(self.states) < 2:
            raise StructureError(f"variable {self.name!r} needs at least 2 states")
        if len(set(self.states)) != len(self.states):
            raise StructureError(f"variable {self.name!r} has duplicate state labels")
        canonical = CANONICAL_DOMAINS.get(self.name)
        if canonical is not None and self.states != canonical:
            raise StructureError(
                f"variable {self.name!r} must carry states {canonical}, got {self.states}"
            )


@dataclass(frozen=True)
class NetworkStructure:
    """Variables plus directed (parent, child) edges forming a DAG.

    ``change_status``, when present, must be terminal: it drives the
    decision and nothing may descend from it.
    """

    variables: tuple[CategoricalVariable, ...]
    edges: tuple[tuple[str, str], ...]
    _parents: dict[str, tuple[str, ...]] = field(
        init=False, repr=False, compare=False, default_factory=dict
    )

    def __post_init__(self) -> None:
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "edges", tuple((p, c) for p, c in self.edges))
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise StructureError("duplicate variable names in structure")
        declared = set(names)
        for parent, child in self.edges:
            for endpoint in (parent, child):
                if endpoint not in declared:
                    raise StructureError(f"edge endpoint {endpoint!r} is not a declared variable")
            if parent == STATUS_VAR:
                raise StructureError(f"{STATUS_VAR} is terminal and cannot have outgoing edges")
        if len(set(self.edges)) != len(self.edges):
            raise StructureError("duplicate edges in structure")
        parents: dict[str, list[str]] = {n: [] for n in names}
        for parent, child in self.edges:
            parents[child].append(parent)
        object.__setattr__(
            self, "_parents", {n: tuple(ps) for n, ps in parents.items()}
        )
        self._check_acyclic(names)

    def _check_acyclic(self, names: list[str]) -> None:
        indegree = {n: len(self._parents[n]) for n in names}
        children: dict[str, list[str]] = {n: [] for n in names}
        for parent, child in self.edges:
            children[parent].append(child)
        ready = [n for n in names if indegree[n] == 0]
        order: list[str] = []
        while ready:
            node = ready.pop(0)
            order.append(node)
            for child in children[node]:
                indegree[child] -= 1
                if indegree[child] == 0:
                    ready.append(child)
        if len(order) != len(names):
            raise StructureError("edges form a cycle")
        object.__setattr__(self, "_topological", tuple(order))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def topological_order(self) -> tuple[str, ...]:
        """Variable names ordered so that parents precede children."""
        return self._topological  # type: ignore[attr-defined]

    def variable(self, name: str) -> CategoricalVariable:
        for v in self.variables:
            if v.name == name:
                return v
        raise StructureError(f"no variable named {name!r}")

    def parents(self, name: str) -> tuple[str, ...]:
        if name not in self._parents:
            raise StructureError(f"no variable named {name!r}")
        return self._parents[name]

    def parent_domains(self, name: str) -> list[tuple[str, ...]]:
        return [self.variable(p).states for p in self.parents(name)]


@dataclass(frozen=True)
class Cpt:
    """Distribution of one variable for every combination of parent states."""

    variable: str
    parent_order: tuple[str, ...]
    table: dict[tuple[str, ...], tuple[float, ...]]

    def __post_init__(self) -> None:
        object.__setattr__(self, "parent_order", tuple(self.parent_order))
        object.__setattr__(
            self,
            "table",
            {tuple(k): tuple(v) for k, v in self.table.items()},
        )


@dataclass(frozen=True)
class TrainedModel:
    """The unit of atomic swap: structure, CPTs, bin thresholds, metadata."""

    structure: NetworkStructure
    cpts: dict[str, Cpt]
    bins: BinThresholds | None
    trained_at: dt.datetime
    training_rows: int
    smoothing_alpha: float


#: Partial assignment of observed states; ``change_status`` is never assignable.
Evidence = Mapping[str, str]


def default_structure(
    extra_edges: Iterable[tuple[str, str]] = (),
) -> NetworkStructure:
    """All five factors as direct parents of the terminal status node."""
    variables = tuple(
        CategoricalVariable(name, CANONICAL_DOMAINS[name])
        for name in (*FACTOR_VARS, STATUS_VAR)
    )
    edges = tuple((f, STATUS_VAR) for f in FACTOR_VARS) + tuple(extra_edges)
    return NetworkStructure(variables, edges)


def structure_from_edges(edges: Iterable[tuple[str, str]]) -> NetworkStructure:
    """Standard six variables with a caller-chosen edge set."""
    variables = tuple(
        CategoricalVariable(name, CANONICAL_DOMAINS[name])
        for name in (*FACTOR_VARS, STATUS_VAR)
    )
    return NetworkStructure(variables, tuple(edges))


def validate_cpt(cpt: Cpt, structure: NetworkStructure) -> None:
    var = structure.variable(cpt.variable)
    if set(cpt.parent_order) != set(structure.parents(cpt.variable)):
        raise StructureError(
            f"CPT for {cpt.variable!r} has parents {cpt.parent_order}, "
            f"structure says {structure.parents(cpt.variable)}"
        )
    domains = [structure.variable(p).states for p in cpt.parent_order]
    expected = set(itertools.product(*domains))
    if set(cpt.table) != expected:
        raise StructureError(
            f"CPT for {cpt.variable!r} must have one row per parent configuration "
            f"({len(expected)} expected, {len(cpt.table)} present)"
        )
    for key, row in cpt.table.items():
        if len(row) != len(var.states):
            raise StructureError(
                f"CPT row {cpt.variable!r}|{key} has {len(row)} entries, "
                f"expected {len(var.states)}"
            )
        if any(p < 0.0 or p > 1.0 for p in row):
            raise StructureError(f"CPT row {cpt.variable!r}|{key} has probability outside [0, 1]")
        if abs(sum(row) - 1.0) > ROW_SUM_TOLERANCE:
            raise StructureError(
                f"CPT row {cpt.variable!r}|{key} sums to {sum(row)!r}, not 1"
            )


def validate_model(model: TrainedModel) -> None:
    if set(model.cpts) != set(model.structure.names):
        raise StructureError("model CPTs must cover every variable exactly once")
    for cpt in model.cpts.values():
        validate_cpt(cpt, model.structure)
    if model.training_rows < 0:
        raise StructureError("training_rows must be >= 0")
    if model.smoothing_alpha <= 0:
        raise StructureError("smoothing_alpha must be positive")


def _utcnow() -> dt.datetime:
    return dt.datetime.now(dt.timezone.utc)


def learn_cpts(
    dataset: Sequence[Mapping[str, str]],
    structure: NetworkStructure,
    alpha: float = 1.0,
    *,
    bins: BinThresholds | None = None,
    trained_at: dt.datetime | None = None,
) -> TrainedModel:
    """Fill every CPT with additively smoothed relative frequencies.

    For variable v with parent configuration u:
    P(v=s | u) = (count(v=s, u) + alpha) / (count(u) + alpha * |states(v)|).
    The dataset may be empty, in which case every row is uniform.
    """
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    state_index = {v.name: {s: i for i, s in enumerate(v.states)} for v in structure.variables}
    for row_number, row in enumerate(dataset):
        for v in structure.variables:
            state = row.get(v.name)
            if state is None:
                raise DatasetError(f"row {row_number} is missing variable {v.name!r}")
            if state not in state_index[v.name]:
                raise DatasetError(
                    f"row {row_number}: {state!r} is not a state of variable {v.name!r}"
                )

    cpts: dict[str, Cpt] = {}
    for v in structure.variables:
        parent_names = structure.parents(v.name)
        counts: dict[tuple[str, ...], list[int]] = {}
        for row in dataset:
            key = tuple(row[p] for p in parent_names)
            bucket = counts.setdefault(key, [0] * len(v.states))
            bucket[state_index[v.name][row[v.name]]] += 1
        table: dict[tuple[str, ...], tuple[float, ...]] = {}
        for key in itertools.product(*structure.parent_domains(v.name)):
            bucket = counts.get(key, [0] * len(v.states))
            denom = sum(bucket) + alpha * len(v.states)
            table[key] = tuple((c + alpha) / denom for c in bucket)
        cpts[v.name] = Cpt(v.name, parent_names, table)

    model = TrainedModel(
        structure=structure,
        cpts=cpts,
        bins=bins,
        trained_at=trained_at if trained_at is not None else _utcnow(),
        training_rows=len(dataset),
        smoothing_alpha=alpha,
    )
    validate_model(model)
    return model


def _check_assignment_states(model: TrainedModel, assignment: Mapping[str, str]) -> None:
    for name, state in assignment.items():
        try:
            var = model.structure.variable(name)
        except StructureError:
            raise EvidenceError(f"unknown variable {name!r}") from None
        if state not in var.states:
            raise EvidenceError(f"{state!r} is not a state of variable {name!r}")


def joint_probability(model: TrainedModel, assignment: Mapping[str, str]) -> float:
    """Product over variables of CPT(v = assignment[v] | assigned parents)."""
    missing = [n for n in model.structure.names if n not in assignment]
    if missing:
        raise EvidenceError(f"assignment is missing variables: {', '.join(missing)}")
    _check_assignment_states(model, assignment)
    p = 1.0
    for v in model.structure.variables:
        cpt = model.cpts[v.name]
        key = tuple(assignment[q] for q in cpt.parent_order)
        p *= cpt.table[key][v.states.index(assignment[v.name])]
    return p


def validate_evidence(model: TrainedModel, evidence: Evidence) -> None:
    if STATUS_VAR in evidence:
        raise EvidenceError(f"{STATUS_VAR} cannot be used as evidence")
    _check_assignment_states(model, evidence)


def infer_merge_probability(model: TrainedModel, evidence: Evidence) -> float:
    """P(change_status = merged | evidence) by exact enumeration.

    Unobserved variables are summed out; the result is normalized over both
    status states. Evidence with zero probability under the model raises
    DegenerateEvidenceError; the caller chooses the fallback policy.
    """
    structure = model.structure
    if STATUS_VAR not in structure.names:
        raise StructureError(f"structure has no {STATUS_VAR} variable")
    validate_evidence(model, evidence)

    status = structure.variable(STATUS_VAR)
    merged_index = status.states.index(MERGED)
    status_cpt = model.cpts[STATUS_VAR]
    others = [v for v in structure.variables if v.name != STATUS_VAR]
    hidden = [v for v in others if v.name not in evidence]

    totals = [0.0] * len(status.states)
    world = dict(evidence)
    for combo in itertools.product(*(v.states for v in hidden)):
        for v, state in zip(hidden, combo):
            world[v.name] = state
        base = 1.0
        for v in others:
            cpt = model.cpts[v.name]
            key = tuple(world[q] for q in cpt.parent_order)
            base *= cpt.table[key][v.states.index(world[v.name])]
        status_key = tuple(world[q] for q in status_cpt.parent_order)
        row = status_cpt.table[status_key]
        for i, p in enumerate(row):
            totals[i] += base * p

    normalizer = sum(totals)
    if normalizer == 0.0:
        raise DegenerateEvidenceError("evidence has zero probability under the model")
    return totals[merged_index] / normalizer
