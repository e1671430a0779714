from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reviewrank.bn import (
    ABANDONED,
    MERGED,
    STATUS_VAR,
    CategoricalVariable,
    Cpt,
    NetworkStructure,
    TrainedModel,
    default_structure,
    infer_merge_probability,
    joint_probability,
    learn_cpts,
    validate_model,
)
from reviewrank.errors import (
    DatasetError,
    DegenerateEvidenceError,
    EvidenceError,
    StructureError,
)

from .oracles import posterior_by_enumeration, smoothed_cpt_by_counting


def status_only_structure():
    return NetworkStructure(
        variables=(CategoricalVariable(STATUS_VAR, (ABANDONED, MERGED)),),
        edges=(),
    )


def size_status_structure():
    return NetworkStructure(
        variables=(
            CategoricalVariable("size", ("Small", "Medium", "Large")),
            CategoricalVariable(STATUS_VAR, (ABANDONED, MERGED)),
        ),
        edges=(("size", STATUS_VAR),),
    )


def build_model(structure, cpts, alpha=1.0):
    import datetime as dt

    return TrainedModel(
        structure=structure,
        cpts=cpts,
        bins=None,
        trained_at=dt.datetime(2024, 1, 1, tzinfo=dt.timezone.utc),
        training_rows=0,
        smoothing_alpha=alpha,
    )


def two_binary_uniform_model():
    structure = NetworkStructure(
        variables=(
            CategoricalVariable("flag", ("no", "yes")),
            CategoricalVariable(STATUS_VAR, (ABANDONED, MERGED)),
        ),
        edges=(("flag", STATUS_VAR),),
    )
    cpts = {
        "flag": Cpt("flag", (), {(): (0.5, 0.5)}),
        STATUS_VAR: Cpt(STATUS_VAR, ("flag",), {("no",): (0.5, 0.5), ("yes",): (0.5, 0.5)}),
    }
    return build_model(structure, cpts)


def three_variable_model():
    """Hand-built: a, b independent parents of change_status."""
    structure = NetworkStructure(
        variables=(
            CategoricalVariable("a", ("a0", "a1")),
            CategoricalVariable("b", ("b0", "b1")),
            CategoricalVariable(STATUS_VAR, (ABANDONED, MERGED)),
        ),
        edges=(("a", STATUS_VAR), ("b", STATUS_VAR)),
    )
    cpts = {
        "a": Cpt("a", (), {(): (0.3, 0.7)}),
        "b": Cpt("b", (), {(): (0.6, 0.4)}),
        STATUS_VAR: Cpt(
            STATUS_VAR,
            ("a", "b"),
            {
                ("a0", "b0"): (0.2, 0.8),
                ("a0", "b1"): (0.5, 0.5),
                ("a1", "b0"): (0.9, 0.1),
                ("a1", "b1"): (0.4, 0.6),
            },
        ),
    }
    return build_model(structure, cpts)


def model_as_oracle_tables(model):
    variables = [(v.name, v.states) for v in model.structure.variables]
    parents = {v.name: model.cpts[v.name].parent_order for v in model.structure.variables}
    cpts = {
        name: {
            key: dict(zip(model.structure.variable(name).states, row))
            for key, row in cpt.table.items()
        }
        for name, cpt in model.cpts.items()
    }
    return variables, parents, cpts


class TestVariablesAndStructure:
    def test_duplicate_states_rejected(self):
        with pytest.raises(StructureError):
            CategoricalVariable("x", ("a", "a"))

    def test_single_state_rejected(self):
        with pytest.raises(StructureError):
            CategoricalVariable("x", ("a",))

    def test_canonical_domain_enforced(self):
        with pytest.raises(StructureError):
            CategoricalVariable("age", ("Low", "High"))
        CategoricalVariable("age", ("Young", "Medium", "Old"))

    def test_cycle_rejected(self):
        with pytest.raises(StructureError, match="cycle"):
            NetworkStructure(
                variables=(
                    CategoricalVariable("a", ("0", "1")),
                    CategoricalVariable("b", ("0", "1")),
                ),
                edges=(("a", "b"), ("b", "a")),
            )

    def test_undeclared_endpoint_rejected(self):
        with pytest.raises(StructureError, match="ghost"):
            NetworkStructure(
                variables=(CategoricalVariable("a", ("0", "1")),),
                edges=(("a", "ghost"),),
            )

    def test_status_must_be_terminal(self):
        with pytest.raises(StructureError, match="terminal"):
            NetworkStructure(
                variables=(
                    CategoricalVariable(STATUS_VAR, (ABANDONED, MERGED)),
                    CategoricalVariable("b", ("0", "1")),
                ),
                edges=((STATUS_VAR, "b"),),
            )

    def test_default_structure_shape(self):
        structure = default_structure()
        assert structure.parents(STATUS_VAR) == (
            "age",
            "size",
            "num_patches",
            "test_verdict",
            "peer_review",
        )
        assert len(structure.variables) == 6

    def test_topological_order_parents_first(self):
        structure = size_status_structure()
        order = structure.topological_order()
        assert order.index("size") < order.index(STATUS_VAR)


class TestLearnCpts:
    def test_empty_dataset_pure_smoothing(self):
        model = learn_cpts([], status_only_structure(), alpha=1.0)
        assert model.cpts[STATUS_VAR].table[()] == (0.5, 0.5)
        assert model.training_rows == 0

    def test_all_merged_smoothed(self):
        rows = [{STATUS_VAR: MERGED}] * 8
        model = learn_cpts(rows, status_only_structure(), alpha=1.0)
        table = model.cpts[STATUS_VAR].table[()]
        assert table[1] == pytest.approx(0.9, abs=1e-15)
        assert table[0] == pytest.approx(0.1, abs=1e-15)

    def test_twenty_row_hand_dataset(self):
        rows = (
            [{"size": "Small", STATUS_VAR: MERGED}] * 6
            + [{"size": "Small", STATUS_VAR: ABANDONED}] * 2
            + [{"size": "Medium", STATUS_VAR: MERGED}] * 3
            + [{"size": "Medium", STATUS_VAR: ABANDONED}] * 4
            + [{"size": "Large", STATUS_VAR: MERGED}] * 1
            + [{"size": "Large", STATUS_VAR: ABANDONED}] * 4
        )
        model = learn_cpts(rows, size_status_structure(), alpha=1.0)

        # Hand-tallied smoothed frequencies, frozen as exact fractions.
        status = model.cpts[STATUS_VAR].table
        assert status[("Small",)] == pytest.approx(
            (float(Fraction(3, 10)), float(Fraction(7, 10))), abs=1e-15
        )
        assert status[("Medium",)] == pytest.approx(
            (float(Fraction(5, 9)), float(Fraction(4, 9))), abs=1e-15
        )
        assert status[("Large",)] == pytest.approx(
            (float(Fraction(5, 7)), float(Fraction(2, 7))), abs=1e-15
        )
        size = model.cpts["size"].table[()]
        assert size == pytest.approx(
            (float(Fraction(9, 23)), float(Fraction(8, 23)), float(Fraction(6, 23))),
            abs=1e-15,
        )

        # And against the independent counting oracle.
        oracle = smoothed_cpt_by_counting(
            rows, STATUS_VAR, (ABANDONED, MERGED), ("size",),
            [("Small", "Medium", "Large")], alpha=1.0,
        )
        for key, row in status.items():
            for state, p in zip((ABANDONED, MERGED), row):
                assert p == pytest.approx(oracle[key][state], abs=1e-12)

    def test_unknown_state_names_row_and_variable(self):
        rows = [{"size": "Small", STATUS_VAR: MERGED}, {"size": "Huge", STATUS_VAR: MERGED}]
        with pytest.raises(DatasetError, match=r"row 1.*'Huge'.*'size'"):
            learn_cpts(rows, size_status_structure())

    def test_missing_variable_rejected(self):
        with pytest.raises(DatasetError, match="missing"):
            learn_cpts([{"size": "Small"}], size_status_structure())

    def test_nonpositive_alpha_rejected(self):
        with pytest.raises(ValueError):
            learn_cpts([], status_only_structure(), alpha=0.0)

    def test_bins_and_alpha_copied_through(self):
        from reviewrank.binning import BinThresholds, Cuts

        bins = BinThresholds(Cuts(1.0, 2.0), Cuts(3.0, 4.0), Cuts(5.0, 6.0))
        model = learn_cpts([], status_only_structure(), alpha=2.5, bins=bins)
        assert model.bins == bins
        assert model.smoothing_alpha == 2.5

    @given(st.data())
    @settings(max_examples=40, deadline=None)
    def test_rows_sum_to_one_property(self, data):
        n_vars = data.draw(st.integers(2, 4))
        names = [f"v{i}" for i in range(n_vars - 1)] + [STATUS_VAR]
        variables = []
        for name in names:
            size = 2 if name == STATUS_VAR else data.draw(st.integers(2, 4))
            states = (
                (ABANDONED, MERGED)
                if name == STATUS_VAR
                else tuple(f"s{j}" for j in range(size))
            )
            variables.append(CategoricalVariable(name, states))
        edges = []
        for i in range(n_vars):
            for j in range(i + 1, n_vars):
                if names[i] != STATUS_VAR and data.draw(st.booleans()):
                    edges.append((names[i], names[j]))
        structure = NetworkStructure(tuple(variables), tuple(edges))
        n_rows = data.draw(st.integers(0, 30))
        rows = [
            {v.name: data.draw(st.sampled_from(v.states)) for v in variables}
            for _ in range(n_rows)
        ]
        alpha = data.draw(st.floats(0.1, 10.0))
        model = learn_cpts(rows, structure, alpha)
        for cpt in model.cpts.values():
            for row in cpt.table.values():
                assert sum(row) == pytest.approx(1.0, abs=1e-9)
                assert all(0.0 <= p <= 1.0 for p in row)

    def test_huge_alpha_approaches_uniform(self):
        rng = random.Random(7)
        structure = size_status_structure()
        rows = [
            {
                "size": rng.choice(("Small", "Medium", "Large")),
                STATUS_VAR: rng.choice((ABANDONED, MERGED)),
            }
            for _ in range(1000)
        ]
        model = learn_cpts(rows, structure, alpha=1e6)
        for cpt in model.cpts.values():
            uniform = 1.0 / len(cpt.table[next(iter(cpt.table))])
            for row in cpt.table.values():
                assert max(abs(p - uniform) for p in row) < 1e-3


class TestJointProbability:
    def test_uniform_two_binary(self):
        model = two_binary_uniform_model()
        assert joint_probability(model, {"flag": "no", STATUS_VAR: MERGED}) == pytest.approx(0.25)

    def test_single_variable_identity(self):
        model = build_model(
            status_only_structure(),
            {STATUS_VAR: Cpt(STATUS_VAR, (), {(): (0.1, 0.9)})},
        )
        assert joint_probability(model, {STATUS_VAR: MERGED}) == pytest.approx(0.9)

    def test_three_variable_hand_multiplication(self):
        model = three_variable_model()
        # 0.7 * 0.6 * 0.1, multiplied by hand
        assert joint_probability(
            model, {"a": "a1", "b": "b0", STATUS_VAR: MERGED}
        ) == pytest.approx(0.042, abs=1e-15)

    def test_incomplete_assignment_lists_missing(self):
        model = three_variable_model()
        with pytest.raises(EvidenceError, match="b"):
            joint_probability(model, {"a": "a0", STATUS_VAR: MERGED})


class TestInference:
    def test_uniform_empty_evidence(self):
        assert infer_merge_probability(two_binary_uniform_model(), {}) == pytest.approx(0.5)

    def test_full_evidence_collapses_to_table_lookup(self):
        model = three_variable_model()
        p = infer_merge_probability(model, {"a": "a1", "b": "b1"})
        assert p == pytest.approx(0.6, abs=1e-12)

    def test_partial_evidence_matches_enumeration_oracle(self):
        model = three_variable_model()
        variables, parents, cpts = model_as_oracle_tables(model)
        for evidence in ({"a": "a0"}, {"b": "b1"}, {}):
            expected = posterior_by_enumeration(
                variables, parents, cpts, STATUS_VAR, MERGED, evidence
            )
            assert infer_merge_probability(model, evidence) == pytest.approx(
                expected, abs=1e-12
            )

    def test_evidence_order_does_not_matter(self):
        model = three_variable_model()
        forward = infer_merge_probability(model, {"a": "a0", "b": "b1"})
        backward = infer_merge_probability(model, {"b": "b1", "a": "a0"})
        assert forward == backward

    def test_status_not_assignable_as_evidence(self):
        with pytest.raises(EvidenceError):
            infer_merge_probability(two_binary_uniform_model(), {STATUS_VAR: MERGED})

    def test_unknown_variable_and_state_rejected(self):
        model = two_binary_uniform_model()
        with pytest.raises(EvidenceError):
            infer_merge_probability(model, {"nope": "x"})
        with pytest.raises(EvidenceError):
            infer_merge_probability(model, {"flag": "maybe"})

    def test_impossible_evidence_raises(self):
        structure = size_status_structure()
        cpts = {
            "size": Cpt("size", (), {(): (0.0, 0.5, 0.5)}),
            STATUS_VAR: Cpt(
                STATUS_VAR,
                ("size",),
                {("Small",): (0.5, 0.5), ("Medium",): (0.5, 0.5), ("Large",): (0.5, 0.5)},
            ),
        }
        model = build_model(structure, cpts)
        with pytest.raises(DegenerateEvidenceError):
            infer_merge_probability(model, {"size": "Small"})


class TestModelValidation:
    def test_missing_cpt_rejected(self):
        model = two_binary_uniform_model()
        broken = TrainedModel(
            structure=model.structure,
            cpts={"flag": model.cpts["flag"]},
            bins=None,
            trained_at=model.trained_at,
            training_rows=0,
            smoothing_alpha=1.0,
        )
        with pytest.raises(StructureError, match="every variable"):
            validate_model(broken)

    def test_bad_row_sum_rejected(self):
        structure = status_only_structure()
        model = build_model(structure, {STATUS_VAR: Cpt(STATUS_VAR, (), {(): (0.4, 0.4)})})
        with pytest.raises(StructureError, match="sums to"):
            validate_model(model)
