"""Grounded reasoner and update engine for hybrid MKNF knowledge bases.

The package computes models of knowledge bases that pair a description
logic ontology with a generalized logic program, and of sequences of such
bases where later versions update earlier ones.  Model sets are kept in a
factored form: independent groups of atoms are stored as separate
components, each holding its admissible truth assignments.

Typical entry points: :func:`load_sequence` to read ``.kb`` files,
:func:`static_models` or :func:`dynamic_models` to solve, and
:func:`entails` with :func:`parse_query` to ask questions.
"""

from .dynmknf import (
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
from .errors import (
    CrossComponentFormula,
    EmptyIntersection,
    EmptyUpdate,
    HybridMknfError,
    KbSyntaxError,
    MixedLayer,
    NotUpdatable,
    NotUpdateEnabling,
    ResourceLimit,
    SortMismatch,
    UndeclaredSymbol,
    UnsortableVariable,
)
from .interp import (
    DEFAULT_LIMITS,
    Atom,
    Component,
    Conj,
    Disj,
    EngineLimits,
    FALSE,
    FULL_SET,
    GroundAtom,
    Implies,
    Known,
    ModelSet,
    Neg,
    NotKnown,
    Sentence,
    Signature,
    TRUE,
    denotation,
    holds_known,
    holds_not,
    intersect,
    model_sets_equal,
    render_model_set,
    restrict,
    satisfies,
)
from .kbmodel import (
    Assertion,
    Axiom,
    DynamicHybridKb,
    HybridKb,
    Ontology,
    RuleSchema,
    single_stage,
)
from .parser import (
    build_kb,
    load_sequence,
    merge_signature,
    parse_kb_text,
    parse_query,
    parse_sequence,
    render_document,
)
from .rules import Rule, dynamic_stable_models, stable_models
from .splitting import (
    LayerPlan,
    SplitCheckReport,
    bottom,
    is_splitting_set,
    reduce_stage,
    slice_stage,
    split_check,
    suggest_plan,
    top,
)
from .winslett import sequence_update_model, theory_model_set, update_with_theory

__all__ = [
    "Assertion",
    "Atom",
    "Axiom",
    "Component",
    "Conj",
    "CrossComponentFormula",
    "DEFAULT_LIMITS",
    "Disj",
    "DynamicHybridKb",
    "EmptyIntersection",
    "EmptyUpdate",
    "EngineLimits",
    "FALSE",
    "FULL_SET",
    "GroundAtom",
    "HybridKb",
    "HybridMknfError",
    "Implies",
    "KbSyntaxError",
    "Known",
    "LayerPlan",
    "MIXED_LAYER",
    "MixedLayer",
    "ModelSet",
    "NOT_BASIC",
    "Neg",
    "NotKnown",
    "NotUpdatable",
    "NotUpdateEnabling",
    "ONTOLOGY_LAYER",
    "O_BASED",
    "Ontology",
    "P_BASED",
    "RULE_LAYER",
    "ResourceLimit",
    "Rule",
    "RuleSchema",
    "Sentence",
    "Signature",
    "SortMismatch",
    "SplitCheckReport",
    "TRUE",
    "UndeclaredSymbol",
    "UnsortableVariable",
    "bottom",
    "build_kb",
    "classify_basic",
    "denotation",
    "dynamic_models",
    "dynamic_stable_models",
    "entails",
    "holds_known",
    "holds_not",
    "intersect",
    "is_splitting_set",
    "is_update_enabling",
    "layer_kinds",
    "load_sequence",
    "merge_signature",
    "model_sets_equal",
    "parse_kb_text",
    "parse_query",
    "parse_sequence",
    "reduce_stage",
    "render_document",
    "render_model_set",
    "restrict",
    "satisfies",
    "sequence_update_model",
    "single_stage",
    "slice_stage",
    "split_check",
    "stable_models",
    "static_models",
    "static_solutions",
    "suggest_plan",
    "theory_model_set",
    "top",
    "update_with_theory",
]
