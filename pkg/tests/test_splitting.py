"""Splitting-set checks, knowledge base slicing, layer plans, and the
plan suggestion heuristic."""

from __future__ import annotations

import json
import random

import pytest

from hybridmknf.errors import NotUpdatable
from hybridmknf.interp import FULL_SET, ModelSet, component_from_models
from hybridmknf.kbmodel import (
    TOP,
    Assertion,
    Axiom,
    ConceptName,
    DynamicHybridKb,
    HybridKb,
    Ontology,
    RuleSchema,
    SchemaAtom,
    SchemaLiteral,
    single_stage,
)
from hybridmknf.parser import load_sequence
from hybridmknf.splitting import (
    LayerPlan,
    bottom,
    is_splitting_set,
    reduce_stage,
    slice_stage,
    split_check,
    suggest_plan,
    top,
)

from helpers import unary_sig

CARGO = "corpus/cargo.kb"
CARGO_UPD = "corpus/cargo_update.kb"
CARGO_PLAN = "corpus/cargo_plan.json"


@pytest.fixture(scope="module")
def cargo():
    return load_sequence([CARGO])


@pytest.fixture(scope="module")
def cargo_pair():
    return load_sequence([CARGO, CARGO_UPD])


def lit(pred: str, positive: bool = True) -> SchemaLiteral:
    return SchemaLiteral(positive, SchemaAtom(pred, ("k0",)))


def test_trivial_splitting_sets(cargo):
    kb = cargo.stages[0]
    every = frozenset(kb.sig.predicates)
    assert is_splitting_set(kb, frozenset())
    assert is_splitting_set(kb, every)
    assert split_check(kb, frozenset()).ok()


def test_split_check_reports_rule_violation(cargo):
    kb = cargo.stages[0]
    report = split_check(kb, frozenset({"AdmissibleImporter"}))
    assert not report.ok()
    (statement, pair) = report.violations[0]
    assert isinstance(statement, RuleSchema)
    assert pair == ("AdmissibleImporter", "SuspectedBadGuy")


def test_split_check_reports_axiom_violation(cargo):
    kb = cargo.stages[0]
    report = split_check(kb, frozenset({"LowRiskEUCommodity"}))
    assert not report.ok()
    kinds = {type(stmt) for stmt, _ in report.violations}
    assert Axiom in kinds


def test_bottom_top_partition_statements(cargo):
    kb = cargo.stages[0]
    plan = json.load(open(CARGO_PLAN))
    u1 = frozenset(plan[1])
    low, high = bottom(kb, u1), top(kb, u1)
    assert len(low.ontology.axioms) + len(high.ontology.axioms) == len(
        kb.ontology.axioms
    )
    assert len(low.ontology.assertions) + len(high.ontology.assertions) == len(
        kb.ontology.assertions
    )
    assert len(low.program) + len(high.program) == len(kb.program)
    assert low.predicates() <= u1


def test_bottom_composes_by_intersection(cargo):
    kb = cargo.stages[0]
    rng = random.Random(61)
    preds = sorted(kb.sig.predicates)
    for _ in range(20):
        u = frozenset(p for p in preds if rng.random() < 0.5)
        v = frozenset(p for p in preds if rng.random() < 0.5)
        assert bottom(bottom(kb, u), v) == bottom(kb, u & v)


def test_slice_is_top_of_bottom(cargo):
    kb = cargo.stages[0]
    plan = json.load(open(CARGO_PLAN))
    lo, hi = frozenset(plan[0]), frozenset(plan[1])
    sliced = slice_stage(kb, lo, hi)
    assert sliced == top(bottom(kb, hi), lo)
    # the second manual-plan layer of the static corpus is pure rules
    assert sliced.ontology.is_empty()
    assert len(sliced.program) == 4


def test_layer_plan_json_round_trip():
    plan = LayerPlan((frozenset({"A"}), frozenset({"A", "B"})))
    data = plan.to_json()
    assert data == [["A"], ["A", "B"]]
    assert LayerPlan.from_json(data) == plan
    with pytest.raises(ValueError):
        LayerPlan.from_json({"layers": []})
    with pytest.raises(ValueError):
        LayerPlan.from_json([["A"], [1]])


def test_layer_plan_validate_errors(cargo):
    full = frozenset(cargo.sig.predicates)
    with pytest.raises(ValueError):
        LayerPlan(()).validate(cargo)
    with pytest.raises(ValueError):
        LayerPlan((full, full)).validate(cargo)
    with pytest.raises(ValueError):
        LayerPlan((frozenset({"Bulk"}),)).validate(cargo)
    with pytest.raises(ValueError):
        # not a splitting set of the only stage
        LayerPlan((frozenset({"AdmissibleImporter"}), full)).validate(cargo)
    manual = LayerPlan.from_json(json.load(open(CARGO_PLAN)))
    manual.validate(cargo)


def test_empty_kb_plan():
    empty = HybridKb(unary_sig(0))
    plan = suggest_plan(single_stage(empty))
    assert len(plan) == 1
    plan.validate(single_stage(empty))


def test_suggest_plan_cargo_static(cargo):
    plan = suggest_plan(cargo)
    plan.validate(cargo)
    assert [len(u) for u in plan.cumulative] == [18, 22, 29, 30]


def test_suggest_plan_cargo_pair(cargo_pair):
    plan = suggest_plan(cargo_pair)
    plan.validate(cargo_pair)
    assert len(plan) == 4
    manual = LayerPlan.from_json(json.load(open(CARGO_PLAN)))
    manual.validate(cargo_pair)


def test_suggest_plan_uniform_kbs():
    sig = unary_sig(2)
    rules_only = HybridKb(sig, Ontology(), (RuleSchema(lit("P0"), (lit("P1", False),)),))
    plan = suggest_plan(DynamicHybridKb(sig, (rules_only, rules_only)))
    assert len(plan) == 1
    ont_only = HybridKb(sig, Ontology((Axiom(ConceptName("P0"), ConceptName("P1")),), ()))
    plan2 = suggest_plan(DynamicHybridKb(sig, (ont_only, ont_only)))
    assert len(plan2) == 1


def test_suggest_plan_not_updatable():
    sig = unary_sig(1)
    mixed = HybridKb(
        sig,
        Ontology((Axiom(TOP, ConceptName("P0")),), ()),
        (RuleSchema(lit("P0"), (lit("P0", False),)),),
    )
    with pytest.raises(NotUpdatable):
        suggest_plan(DynamicHybridKb(sig, (mixed, mixed)))
    # a single stage tolerates the mix
    assert len(suggest_plan(single_stage(mixed))) == 1


def test_reduce_stage_rule_outcomes():
    sig = unary_sig(3)
    slice_kb = HybridKb(
        sig,
        Ontology(),
        (RuleSchema(lit("P2"), (lit("P1"), lit("P0", False))),),
    )
    lo = frozenset({"P0", "P1"})
    p1_known = ModelSet((component_from_models([1], [frozenset({1})]),))
    sents, rules = reduce_stage(slice_kb, lo, p1_known)
    assert sents == []
    assert [(r.head, r.body) for r in rules] == [((True, 2), ())]
    # a known-true lower atom defeats its default literal
    p0_known = ModelSet((component_from_models([0, 1], [frozenset({0, 1})]),))
    assert reduce_stage(slice_kb, lo, p0_known) == ([], [])
    # an unknown positive literal blocks the instance
    assert reduce_stage(slice_kb, lo, FULL_SET) == ([], [])


def test_reduce_stage_grounds_ontology():
    sig = unary_sig(2)
    ont = HybridKb(
        sig,
        Ontology(
            (Axiom(ConceptName("P0"), ConceptName("P1")),),
            (Assertion("P0", ("k0",)),),
        ),
    )
    sents, rules = reduce_stage(ont, frozenset(), FULL_SET)
    assert rules == []
    assert len(sents) == 2
