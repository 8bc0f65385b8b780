"""Layer-wise model computation for knowledge base sequences.

Each layer of a plan is solved per branch of choices made in the layers
below it.  Ontology-like layers update classical theories stage by stage
and contribute one solution set; rule-like layers contribute one branch per
stable model of the combined stage programs.  The final sets are the
intersections across layers that also satisfy the newest stage in full.
"""

from __future__ import annotations

from typing import Sequence

from .errors import EmptyUpdate, MixedLayer, NotUpdateEnabling, ResourceLimit
from .interp import (
    Atom,
    Component,
    DEFAULT_LIMITS,
    EngineLimits,
    Known,
    ModelSet,
    Sentence,
    model_sets_equal,
    satisfies,
)
from .kbmodel import DynamicHybridKb, HybridKb, modal_rule, single_stage
from .rules import dynamic_stable_models
from .splitting import (
    LayerPlan,
    is_ontology_reducible,
    is_rule_reducible,
    reduce_stage,
    slice_stage,
    suggest_plan,
)
from .winslett import sequence_update_model

_DIRECT_LAYER_ATOMS = 4

ONTOLOGY_LAYER = "ontology"
RULE_LAYER = "rules"
MIXED_LAYER = "mixed"

O_BASED = "ontology-based"
P_BASED = "rules-based"
NOT_BASIC = "not-basic"


def classify_basic(dkb: DynamicHybridKb) -> str:
    """Whether every stage is fact-only rules, empty ontologies, or neither.

    A sequence qualifying both ways reports ontology-based; the two
    treatments agree on such input.
    """
    if all(
        schema.head.positive and not schema.body
        for kb in dkb.stages
        for schema in kb.program
    ):
        return O_BASED
    if all(kb.ontology.is_empty() for kb in dkb.stages):
        return P_BASED
    return NOT_BASIC


def layer_kinds(dkb: DynamicHybridKb, plan: LayerPlan) -> list[str]:
    """Character of each layer across all stages; ontology wins ties."""
    out = []
    for lo, hi in plan.slices():
        slices = [slice_stage(kb, lo, hi) for kb in dkb.stages]
        if all(is_ontology_reducible(s, lo) for s in slices):
            out.append(ONTOLOGY_LAYER)
        elif all(is_rule_reducible(s) for s in slices):
            out.append(RULE_LAYER)
        else:
            out.append(MIXED_LAYER)
    return out


def is_update_enabling(dkb: DynamicHybridKb, plan: LayerPlan) -> bool:
    plan.validate(dkb)
    return MIXED_LAYER not in layer_kinds(dkb, plan)


def _direct_layer_models(
    sentences: Sequence[Sentence], scope: Sequence[int]
) -> list[Component]:
    from .oracle import brute_mknf_models

    atoms = tuple(sorted(scope))
    bit = {a: i for i, a in enumerate(atoms)}
    out = []
    for model in brute_mknf_models(sentences, atoms):
        parts = frozenset(
            sum(1 << bit[a] for a in interp if a in bit) for interp in model
        )
        out.append(Component(atoms, parts))
    return out


def _solve(
    dkb: DynamicHybridKb,
    plan: LayerPlan | None,
    limits: EngineLimits,
) -> list[tuple[ModelSet, tuple[ModelSet, ...]]]:
    if plan is None:
        plan = suggest_plan(dkb)
    plan.validate(dkb)
    sig = dkb.sig
    n_stages = len(dkb.stages)
    branches: list[tuple[list[Component], list[ModelSet]]] = [([], [])]
    for layer_idx, (lo, hi) in enumerate(plan.slices()):
        scope = sig.atoms_of_preds(hi - lo)
        slices = [slice_stage(kb, lo, hi) for kb in dkb.stages]
        o_ok = all(is_ontology_reducible(s, lo) for s in slices)
        p_ok = all(is_rule_reducible(s) for s in slices)
        if o_ok:
            kind = ONTOLOGY_LAYER
        elif p_ok:
            kind = RULE_LAYER
        elif n_stages == 1 and len(scope) <= _DIRECT_LAYER_ATOMS:
            kind = MIXED_LAYER
        elif n_stages == 1:
            raise MixedLayer(
                f"layer {layer_idx} mixes ontology and rule content over "
                f"{len(scope)} atoms, too many to solve directly"
            )
        else:
            raise NotUpdateEnabling(
                f"layer {layer_idx} is neither ontology-like nor rule-like "
                "across all stages"
            )

        new_branches: list[tuple[list[Component], list[ModelSet]]] = []
        for comps, per_layer in branches:
            prefix = ModelSet(tuple(comps))
            reduced = [reduce_stage(s, lo, prefix, limits) for s in slices]
            if kind == ONTOLOGY_LAYER:
                theories = []
                for sentences, layer_rules in reduced:
                    facts: list[Sentence] = []
                    for rule in layer_rules:
                        # reduction leaves bare facts in an ontology layer
                        assert rule.head[0] and not rule.body
                        facts.append(Atom(rule.head[1]))
                    theories.append(list(sentences) + facts)
                try:
                    x = sequence_update_model(theories, limits)
                except EmptyUpdate:
                    if n_stages == 1:
                        continue
                    raise
                new_branches.append(
                    (comps + list(x.components), per_layer + [x])
                )
            elif kind == RULE_LAYER:
                programs = [layer_rules for _, layer_rules in reduced]
                for stable in dynamic_stable_models(programs, scope, limits):
                    extra = [
                        Component((a,), frozenset((1,))) for a in sorted(stable)
                    ]
                    new_branches.append(
                        (comps + extra, per_layer + [ModelSet(tuple(extra))])
                    )
            else:
                sentences, layer_rules = reduced[0]
                modal = [Known(s) for s in sentences]
                modal.extend(modal_rule(r) for r in layer_rules)
                for comp in _direct_layer_models(modal, sorted(scope)):
                    new_branches.append(
                        (comps + [comp], per_layer + [ModelSet((comp,))])
                    )
        if len(new_branches) > limits.max_branches:
            raise ResourceLimit(
                f"layer {layer_idx} split into more than "
                f"{limits.max_branches} branches"
            )
        branches = new_branches

    newest = dkb.newest().modal_sentences()
    out: list[tuple[ModelSet, tuple[ModelSet, ...]]] = []
    for comps, per_layer in branches:
        m = ModelSet(tuple(comps))
        if all(satisfies(m, s, limits) for s in newest):
            if not any(model_sets_equal(m, seen) for seen, _ in out):
                out.append((m, tuple(per_layer)))
    return out


def dynamic_models(
    dkb: DynamicHybridKb,
    plan: LayerPlan | None = None,
    limits: EngineLimits = DEFAULT_LIMITS,
) -> list[ModelSet]:
    """All models of the sequence under a layer plan.

    With a single stage this computes the models of that base alone.  Layers
    that mix ontology and rule content are only solved directly when they are
    tiny and the sequence has one stage; otherwise they raise MixedLayer or,
    for longer sequences, NotUpdateEnabling.
    """
    return [m for m, _ in _solve(dkb, plan, limits)]


def static_models(
    kb: HybridKb,
    plan: LayerPlan | None = None,
    limits: EngineLimits = DEFAULT_LIMITS,
) -> list[ModelSet]:
    """Models of a single knowledge base via a one-stage sequence."""
    return dynamic_models(single_stage(kb), plan, limits)


def static_solutions(
    kb: HybridKb,
    plan: LayerPlan | None = None,
    limits: EngineLimits = DEFAULT_LIMITS,
) -> list[tuple[tuple[ModelSet, ...], ModelSet]]:
    """Per-layer solution chains paired with their combined model."""
    return [
        (per_layer, m) for m, per_layer in _solve(single_stage(kb), plan, limits)
    ]


def entails(
    models: Sequence[ModelSet],
    query: Sentence,
    limits: EngineLimits = DEFAULT_LIMITS,
) -> bool:
    """Whether every model satisfies the query; vacuously true without models."""
    return all(satisfies(m, query, limits) for m in models)
