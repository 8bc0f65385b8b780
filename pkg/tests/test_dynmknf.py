"""Layer-wise solving of knowledge base sequences, compared with the
exhaustive modal sweep and the two single-character treatments."""

from __future__ import annotations

import dataclasses
import random

import pytest

from hybridmknf.dynmknf import (
    MIXED_LAYER,
    NOT_BASIC,
    O_BASED,
    ONTOLOGY_LAYER,
    P_BASED,
    RULE_LAYER,
    classify_basic,
    dynamic_models,
    entails,
    is_update_enabling,
    layer_kinds,
    static_models,
    static_solutions,
)
from hybridmknf.errors import (
    EmptyUpdate,
    MixedLayer,
    NotUpdateEnabling,
    ResourceLimit,
)
from hybridmknf.interp import (
    DEFAULT_LIMITS,
    FULL_SET,
    Atom,
    Known,
    ModelSet,
    NotKnown,
)
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
from hybridmknf.oracle import brute_mknf_models
from hybridmknf.rules import dynamic_stable_models
from hybridmknf.splitting import LayerPlan, suggest_plan
from hybridmknf.winslett import sequence_update_model

from helpers import denot, denot_family, rnd_hybrid_kb, unary_sig, upset


def lit(pred: str, positive: bool = True) -> SchemaLiteral:
    return SchemaLiteral(positive, SchemaAtom(pred, ("k0",)))


def fact(pred: str) -> RuleSchema:
    return RuleSchema(lit(pred))


def test_classify_basic():
    sig = unary_sig(2)
    facts_and_axioms = HybridKb(
        sig, Ontology((Axiom(ConceptName("P0"), ConceptName("P1")),), ()), (fact("P0"),)
    )
    assert classify_basic(single_stage(facts_and_axioms)) == O_BASED
    rules_only = HybridKb(sig, Ontology(), (RuleSchema(lit("P0"), (lit("P1", False),)),))
    assert classify_basic(single_stage(rules_only)) == P_BASED
    both = HybridKb(
        sig,
        Ontology((Axiom(ConceptName("P0"), ConceptName("P1")),), ()),
        (RuleSchema(lit("P0"), (lit("P1", False),)),),
    )
    assert classify_basic(single_stage(both)) == NOT_BASIC
    # fact-only programs with empty ontologies count as ontology-based
    plain = HybridKb(sig, Ontology(), (fact("P0"),))
    assert classify_basic(single_stage(plain)) == O_BASED


def test_layer_kinds_and_enabling():
    sig = unary_sig(2)
    kb = HybridKb(
        sig,
        Ontology((Axiom(TOP, ConceptName("P0")),), ()),
        (RuleSchema(lit("P1"), (lit("P1", False),)),),
    )
    dkb = DynamicHybridKb(sig, (kb, kb))
    split = LayerPlan((frozenset({"P0"}), frozenset({"P0", "P1"})))
    assert layer_kinds(dkb, split) == [ONTOLOGY_LAYER, RULE_LAYER]
    assert is_update_enabling(dkb, split)
    lumped = LayerPlan((frozenset({"P0", "P1"}),))
    assert layer_kinds(dkb, lumped) == [MIXED_LAYER]
    assert not is_update_enabling(dkb, lumped)


def test_static_matches_modal_sweep():
    rng = random.Random(71)
    checked = 0
    for _ in range(150):
        kb = rnd_hybrid_kb(rng)
        atoms = range(len(kb.sig.atoms))
        got = denot_family(static_models(kb), atoms)
        want = frozenset(
            frozenset(model) for model in brute_mknf_models(kb.modal_sentences(), list(atoms))
        )
        assert got == want
        checked += 1
    assert checked == 150


def test_ontology_sequence_matches_update_fold():
    rng = random.Random(72)
    agreed = 0
    for _ in range(80):
        sig = unary_sig(3)
        stages = []
        for _ in range(rng.randint(2, 3)):
            axioms = tuple(
                Axiom(
                    ConceptName(f"P{rng.randrange(3)}"),
                    ConceptName(f"P{rng.randrange(3)}"),
                )
                for _ in range(rng.randint(0, 2))
            )
            assertions = tuple(
                Assertion(f"P{rng.randrange(3)}", ("k0",), positive=rng.random() < 0.6)
                for _ in range(rng.randint(0, 2))
            )
            stages.append(HybridKb(sig, Ontology(axioms, assertions)))
        dkb = DynamicHybridKb(sig, tuple(stages))
        theories = [kb.ontology_sentences() for kb in stages]
        try:
            want = sequence_update_model(theories)
        except EmptyUpdate:
            with pytest.raises(EmptyUpdate):
                dynamic_models(dkb)
            continue
        got = dynamic_models(dkb)
        assert len(got) == 1
        assert denot(got[0], range(3)) == denot(want, range(3))
        agreed += 1
    assert agreed > 40


def test_rule_sequence_matches_stable_up_sets():
    rng = random.Random(73)
    for _ in range(80):
        sig = unary_sig(4)
        stages = []
        for _ in range(rng.randint(1, 3)):
            schemas = tuple(
                RuleSchema(
                    lit(f"P{rng.randrange(4)}", rng.random() < 0.8),
                    tuple(
                        lit(f"P{rng.randrange(4)}", rng.random() < 0.6)
                        for _ in range(rng.randint(0, 2))
                    ),
                )
                for _ in range(rng.randint(1, 4))
            )
            stages.append(HybridKb(sig, Ontology(), schemas))
        dkb = DynamicHybridKb(sig, tuple(stages))
        atoms = range(4)
        stable = dynamic_stable_models(
            [kb.ground_rules() for kb in stages], frozenset(atoms)
        )
        want = frozenset(upset(s, atoms) for s in stable)
        assert denot_family(dynamic_models(dkb), atoms) == want


def test_static_solutions_chain_shape():
    rng = random.Random(74)
    for _ in range(30):
        kb = rnd_hybrid_kb(rng)
        plan = suggest_plan(single_stage(kb))
        pairs = static_solutions(kb, plan)
        models = static_models(kb, plan)
        assert len(pairs) == len(models)
        for per_layer, combined in pairs:
            assert len(per_layer) == len(plan)
            rebuilt = ModelSet(
                tuple(c for layer in per_layer for c in layer.components)
            )
            assert denot(rebuilt, range(4)) == denot(combined, range(4))


def test_mixed_layer_too_large_raises():
    sig = unary_sig(5)
    axioms = tuple(
        Axiom(ConceptName(f"P{i}"), ConceptName(f"P{i + 1}")) for i in range(4)
    )
    kb = HybridKb(
        sig,
        Ontology(axioms, ()),
        (RuleSchema(lit("P0"), (lit("P4", False),)),),
    )
    with pytest.raises(MixedLayer):
        static_models(kb)


def test_sequence_mixed_layer_raises():
    sig = unary_sig(1)
    mixed = HybridKb(
        sig,
        Ontology((Axiom(TOP, ConceptName("P0")),), ()),
        (RuleSchema(lit("P0"), (lit("P0", False),)),),
    )
    dkb = DynamicHybridKb(sig, (mixed, mixed))
    with pytest.raises(NotUpdateEnabling):
        dynamic_models(dkb, LayerPlan((frozenset({"P0"}),)))


def test_branch_budget():
    sig = unary_sig(4)
    loops = (
        RuleSchema(lit("P0"), (lit("P1", False),)),
        RuleSchema(lit("P1"), (lit("P0", False),)),
        RuleSchema(lit("P2"), (lit("P3", False),)),
        RuleSchema(lit("P3"), (lit("P2", False),)),
    )
    kb = HybridKb(sig, Ontology(), loops)
    assert len(static_models(kb)) == 4
    tight = dataclasses.replace(DEFAULT_LIMITS, max_branches=2)
    with pytest.raises(ResourceLimit):
        static_models(kb, limits=tight)


def test_entails_conventions():
    p = Atom(0)
    assert entails([], Known(p))
    assert entails([FULL_SET], NotKnown(p))
    assert not entails([FULL_SET], Known(p))
