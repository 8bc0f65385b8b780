"""Sorted signatures, ground sentences, and factored sets of interpretations.

An interpretation over a finite signature is the set of ground atoms it makes
true.  Sets of interpretations are the semantic objects everything else works
with; they are kept in a factored form: a list of components with disjoint
atom scopes, each holding an explicit nonempty set of parts over its scope.
The factored set denotes every interpretation whose restriction to each
component scope is one of that component's parts, with all atoms outside any
scope left unconstrained.  This is exactly a set that is saturated outside its
components, so restriction and saturation share one representation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence, Union

import numpy as np

from .errors import (
    CrossComponentFormula,
    EmptyIntersection,
    ResourceLimit,
    SortMismatch,
    UndeclaredSymbol,
)


# ---------------------------------------------------------------------------
# signatures


@dataclass(frozen=True)
class GroundAtom:
    pred: str
    args: tuple[str, ...]

    def __str__(self) -> str:
        if not self.args:
            return self.pred
        return "%s(%s)" % (self.pred, ", ".join(self.args))


class Signature:
    """Finite sorted vocabulary with a dense index of well-sorted ground atoms.

    Predicates carry a tuple of argument sorts and constants carry a sort.
    The ground atom universe is the set of all well-sorted applications,
    enumerated in a fixed order: predicates sorted by name, argument tuples
    in lexicographic order of the sorted constant lists.
    """

    def __init__(
        self,
        sorts: Iterable[str],
        constants: Mapping[str, str],
        predicates: Mapping[str, Sequence[str]],
    ) -> None:
        self.sorts = frozenset(sorts)
        self.constants = dict(sorted(constants.items()))
        self.predicates = {name: tuple(args) for name, args in sorted(predicates.items())}
        for const, sort in self.constants.items():
            if sort not in self.sorts:
                raise UndeclaredSymbol(f"constant {const} uses undeclared sort {sort}")
        for pred, args in self.predicates.items():
            for sort in args:
                if sort not in self.sorts:
                    raise UndeclaredSymbol(f"predicate {pred} uses undeclared sort {sort}")
        self._constants_by_sort: dict[str, tuple[str, ...]] = {s: () for s in self.sorts}
        for const, sort in self.constants.items():
            self._constants_by_sort[sort] = self._constants_by_sort[sort] + (const,)
        atoms: list[GroundAtom] = []
        for pred, arg_sorts in self.predicates.items():
            pools = [self._constants_by_sort[s] for s in arg_sorts]
            for args in itertools.product(*pools):
                atoms.append(GroundAtom(pred, args))
        self.atoms: tuple[GroundAtom, ...] = tuple(atoms)
        self.atom_index: dict[GroundAtom, int] = {a: i for i, a in enumerate(self.atoms)}
        by_pred: dict[str, set[int]] = {p: set() for p in self.predicates}
        for i, a in enumerate(self.atoms):
            by_pred[a.pred].add(i)
        self._atoms_by_pred = {p: frozenset(s) for p, s in by_pred.items()}

    def constants_of_sort(self, sort: str) -> tuple[str, ...]:
        if sort not in self.sorts:
            raise UndeclaredSymbol(f"undeclared sort {sort}")
        return self._constants_by_sort[sort]

    def atom(self, pred: str, args: Sequence[str]) -> int:
        """Index of a ground atom, checking declaration and sorts."""
        if pred not in self.predicates:
            raise UndeclaredSymbol(f"undeclared predicate {pred}")
        arg_sorts = self.predicates[pred]
        if len(args) != len(arg_sorts):
            raise SortMismatch(f"{pred} expects {len(arg_sorts)} arguments, got {len(args)}")
        for const, sort in zip(args, arg_sorts):
            if const not in self.constants:
                raise UndeclaredSymbol(f"undeclared constant {const}")
            if self.constants[const] != sort:
                raise SortMismatch(
                    f"{pred} expects sort {sort} where constant {const} of sort "
                    f"{self.constants[const]} appears"
                )
        return self.atom_index[GroundAtom(pred, tuple(args))]

    def atoms_of_pred(self, pred: str) -> frozenset[int]:
        if pred not in self.predicates:
            raise UndeclaredSymbol(f"undeclared predicate {pred}")
        return self._atoms_by_pred[pred]

    def atoms_of_preds(self, preds: Iterable[str]) -> frozenset[int]:
        out: set[int] = set()
        for p in preds:
            out |= self.atoms_of_pred(p)
        return frozenset(out)

    def pred_of(self, atom: int) -> str:
        return self.atoms[atom].pred

    def __len__(self) -> int:
        return len(self.atoms)


# ---------------------------------------------------------------------------
# ground sentences

# Grammar of ground sentences: atoms, classical negation, conjunction,
# disjunction, a rule-shaped conditional, and the two modalities.  Empty
# conjunction serves as verum, empty disjunction as falsum.


@dataclass(frozen=True)
class Atom:
    index: int


@dataclass(frozen=True)
class Neg:
    sub: "Sentence"


@dataclass(frozen=True)
class Conj:
    subs: tuple["Sentence", ...]


@dataclass(frozen=True)
class Disj:
    subs: tuple["Sentence", ...]


@dataclass(frozen=True)
class Implies:
    body: "Sentence"
    head: "Sentence"


@dataclass(frozen=True)
class Known:
    sub: "Sentence"


@dataclass(frozen=True)
class NotKnown:
    sub: "Sentence"


Sentence = Union[Atom, Neg, Conj, Disj, Implies, Known, NotKnown]

TRUE: Sentence = Conj(())
FALSE: Sentence = Disj(())


def conj(subs: Sequence[Sentence]) -> Sentence:
    subs = tuple(s for s in subs if s != TRUE)
    if any(s == FALSE for s in subs):
        return FALSE
    if len(subs) == 1:
        return subs[0]
    return Conj(subs)


def disj(subs: Sequence[Sentence]) -> Sentence:
    subs = tuple(s for s in subs if s != FALSE)
    if any(s == TRUE for s in subs):
        return TRUE
    if len(subs) == 1:
        return subs[0]
    return Disj(subs)


def atoms_of(sent: Sentence) -> frozenset[int]:
    if isinstance(sent, Atom):
        return frozenset((sent.index,))
    if isinstance(sent, (Neg, Known, NotKnown)):
        return atoms_of(sent.sub)
    if isinstance(sent, (Conj, Disj)):
        out: frozenset[int] = frozenset()
        for s in sent.subs:
            out |= atoms_of(s)
        return out
    if isinstance(sent, Implies):
        return atoms_of(sent.body) | atoms_of(sent.head)
    raise TypeError(f"not a sentence: {sent!r}")


def is_objective(sent: Sentence) -> bool:
    """True when the sentence contains no modality."""
    if isinstance(sent, Atom):
        return True
    if isinstance(sent, Neg):
        return is_objective(sent.sub)
    if isinstance(sent, (Conj, Disj)):
        return all(is_objective(s) for s in sent.subs)
    if isinstance(sent, Implies):
        return is_objective(sent.body) and is_objective(sent.head)
    return False


def eval_objective(sent: Sentence, true_atoms: frozenset[int]) -> bool:
    """Classical truth of an objective sentence in one interpretation."""
    if isinstance(sent, Atom):
        return sent.index in true_atoms
    if isinstance(sent, Neg):
        return not eval_objective(sent.sub, true_atoms)
    if isinstance(sent, Conj):
        return all(eval_objective(s, true_atoms) for s in sent.subs)
    if isinstance(sent, Disj):
        return any(eval_objective(s, true_atoms) for s in sent.subs)
    if isinstance(sent, Implies):
        return (not eval_objective(sent.body, true_atoms)) or eval_objective(
            sent.head, true_atoms
        )
    raise ValueError(f"sentence is not objective: {sent!r}")


def compile_objective(sent: Sentence, bit_of: Mapping[int, int]) -> Callable[[int], bool]:
    """Compile an objective sentence to a predicate on bitmasks.

    bit_of maps atom indices to bit positions inside the mask.
    """
    if isinstance(sent, Atom):
        bit = bit_of[sent.index]
        return lambda m: bool(m >> bit & 1)
    if isinstance(sent, Neg):
        f = compile_objective(sent.sub, bit_of)
        return lambda m: not f(m)
    if isinstance(sent, Conj):
        fs = [compile_objective(s, bit_of) for s in sent.subs]
        return lambda m: all(f(m) for f in fs)
    if isinstance(sent, Disj):
        fs = [compile_objective(s, bit_of) for s in sent.subs]
        return lambda m: any(f(m) for f in fs)
    if isinstance(sent, Implies):
        fb = compile_objective(sent.body, bit_of)
        fh = compile_objective(sent.head, bit_of)
        return lambda m: (not fb(m)) or fh(m)
    raise ValueError(f"sentence is not objective: {sent!r}")


def eval_objective_masks(
    sent: Sentence, bit_of: Mapping[int, int], masks: np.ndarray
) -> np.ndarray:
    """Vectorised classical truth of an objective sentence over mask arrays."""
    if isinstance(sent, Atom):
        return (masks >> bit_of[sent.index] & 1).astype(bool)
    if isinstance(sent, Neg):
        return ~eval_objective_masks(sent.sub, bit_of, masks)
    if isinstance(sent, Conj):
        out = np.ones(masks.shape, dtype=bool)
        for s in sent.subs:
            out &= eval_objective_masks(s, bit_of, masks)
        return out
    if isinstance(sent, Disj):
        out = np.zeros(masks.shape, dtype=bool)
        for s in sent.subs:
            out |= eval_objective_masks(s, bit_of, masks)
        return out
    if isinstance(sent, Implies):
        return (~eval_objective_masks(sent.body, bit_of, masks)) | eval_objective_masks(
            sent.head, bit_of, masks
        )
    raise ValueError(f"sentence is not objective: {sent!r}")


def render_sentence(sent: Sentence, sig: Signature) -> str:
    if isinstance(sent, Atom):
        return str(sig.atoms[sent.index])
    if isinstance(sent, Neg):
        return f"-{render_sentence(sent.sub, sig)}"
    if isinstance(sent, Conj):
        if not sent.subs:
            return "true"
        return "(" + " & ".join(render_sentence(s, sig) for s in sent.subs) + ")"
    if isinstance(sent, Disj):
        if not sent.subs:
            return "false"
        return "(" + " | ".join(render_sentence(s, sig) for s in sent.subs) + ")"
    if isinstance(sent, Implies):
        return (
            f"({render_sentence(sent.head, sig)} <- {render_sentence(sent.body, sig)})"
        )
    if isinstance(sent, Known):
        return f"K {render_sentence(sent.sub, sig)}"
    if isinstance(sent, NotKnown):
        return f"not {render_sentence(sent.sub, sig)}"
    raise TypeError(f"not a sentence: {sent!r}")


# ---------------------------------------------------------------------------
# interpretations


@dataclass(frozen=True)
class Interpretation:
    """A set of true atoms together with the scope it is read over."""

    scope: frozenset[int]
    true_atoms: frozenset[int]

    def __post_init__(self) -> None:
        if not self.true_atoms <= self.scope:
            raise ValueError("true atoms must lie inside the scope")

    def restrict(self, atoms: frozenset[int]) -> "Interpretation":
        return Interpretation(self.scope & atoms, self.true_atoms & atoms)


def restrict_model(true_atoms: frozenset[int], atoms: frozenset[int]) -> frozenset[int]:
    return true_atoms & atoms


# ---------------------------------------------------------------------------
# engine limits


@dataclass(frozen=True)
class EngineLimits:
    """Budgets that turn would-be thrashing into a resource error.

    max_component_atoms bounds the number of atoms a single truth table
    enumeration may range over; larger components are handled by conditioning
    on a small separator whose blocks each fit the bound again.
    """

    max_component_atoms: int = 22
    max_separator_atoms: int = 12
    max_parts: int = 1 << 21
    max_branches: int = 64
    max_query_free_atoms: int = 16


DEFAULT_LIMITS = EngineLimits()


# ---------------------------------------------------------------------------
# factored model sets


@dataclass(frozen=True)
class Component:
    """Explicit part set over a small, sorted tuple of atom indices.

    Parts are bitmasks relative to the atoms tuple: bit i of a part mask is
    the truth value of atoms[i].
    """

    atoms: tuple[int, ...]
    parts: frozenset[int]

    def __post_init__(self) -> None:
        if not self.atoms:
            raise ValueError("component needs a nonempty scope")
        if tuple(sorted(set(self.atoms))) != self.atoms:
            raise ValueError("component atoms must be sorted and unique")
        if not self.parts:
            raise ValueError("component needs a nonempty part set")
        top = 1 << len(self.atoms)
        if any(p < 0 or p >= top for p in self.parts):
            raise ValueError("part mask out of range for the component scope")

    @property
    def scope(self) -> frozenset[int]:
        return frozenset(self.atoms)

    def is_full(self) -> bool:
        return len(self.parts) == 1 << len(self.atoms)

    def bit_of(self) -> dict[int, int]:
        return {a: i for i, a in enumerate(self.atoms)}

    def mask_of(self, true_atoms: Iterable[int]) -> int:
        bit = self.bit_of()
        m = 0
        for a in true_atoms:
            if a in bit:
                m |= 1 << bit[a]
        return m

    def set_of(self, mask: int) -> frozenset[int]:
        return frozenset(a for i, a in enumerate(self.atoms) if mask >> i & 1)

    def project(self, atoms: Iterable[int]) -> "Component | None":
        """Component over the given subset of this scope, or None if disjoint."""
        keep = tuple(a for a in self.atoms if a in set(atoms))
        if not keep:
            return None
        positions = [self.atoms.index(a) for a in keep]
        parts = frozenset(
            sum(((p >> pos & 1) << i) for i, pos in enumerate(positions))
            for p in self.parts
        )
        return Component(keep, parts)


def component_from_models(
    atoms: Sequence[int], models: Iterable[frozenset[int]]
) -> Component:
    atoms = tuple(sorted(atoms))
    bit = {a: i for i, a in enumerate(atoms)}
    parts = frozenset(
        sum(1 << bit[a] for a in model if a in bit) for model in models
    )
    return Component(atoms, parts)


@dataclass(frozen=True)
class ModelSet:
    """Factored set of interpretations: disjoint components, free elsewhere."""

    components: tuple[Component, ...]

    def __post_init__(self) -> None:
        seen: set[int] = set()
        for c in self.components:
            if seen & c.scope:
                raise ValueError("component scopes must be pairwise disjoint")
            seen |= c.scope
        ordered = tuple(sorted(self.components, key=lambda c: c.atoms[0]))
        object.__setattr__(self, "components", ordered)

    @property
    def scope(self) -> frozenset[int]:
        out: set[int] = set()
        for c in self.components:
            out |= c.scope
        return frozenset(out)

    def component_of(self, atom: int) -> Component | None:
        for c in self.components:
            if atom in c.scope:
                return c
        return None

    def part_count(self) -> int:
        return sum(len(c.parts) for c in self.components)


FULL_SET = ModelSet(())


def from_models(atoms: Sequence[int], models: Iterable[frozenset[int]]) -> ModelSet:
    """Single-component model set from an explicit list of interpretations."""
    models = list(models)
    if not models:
        raise ValueError("a model set cannot be empty")
    if not atoms:
        return FULL_SET
    return ModelSet((component_from_models(atoms, models),))


def restrict(m: ModelSet, atoms: frozenset[int]) -> ModelSet:
    """Restriction of the denoted set to the given atoms.

    The result read as a full model set is the saturation of m with respect
    to the given atoms: the greatest set that coincides with m on them.
    """
    out = []
    for c in m.components:
        p = c.project(atoms)
        if p is not None:
            out.append(p)
    return ModelSet(tuple(out))


def saturate(m: ModelSet, atoms: frozenset[int]) -> ModelSet:
    """Greatest set of interpretations coinciding with m on the given atoms."""
    return restrict(m, atoms)


def intersect(
    a: ModelSet, b: ModelSet, limits: EngineLimits = DEFAULT_LIMITS
) -> ModelSet:
    """Intersection of two factored sets.

    Components with disjoint scopes concatenate; overlapping components are
    joined into one component whose parts satisfy both sides.  Raises
    EmptyIntersection when the combined denotation is empty.
    """
    tagged = [(0, c) for c in a.components] + [(1, c) for c in b.components]
    parent: dict[int, int] = {}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> None:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    for _, c in tagged:
        for at in c.atoms:
            parent.setdefault(at, at)
        for at in c.atoms[1:]:
            union(c.atoms[0], at)
    groups: dict[int, list[tuple[int, Component]]] = {}
    for side, c in tagged:
        groups.setdefault(find(c.atoms[0]), []).append((side, c))

    out: list[Component] = []
    for members in groups.values():
        if len(members) == 1:
            out.append(members[0][1])
            continue
        out.append(_join_components(members, limits))
    return ModelSet(tuple(out))


def _join_components(
    members: list[tuple[int, Component]], limits: EngineLimits
) -> Component:
    scope = tuple(sorted(set().union(*(c.scope for _, c in members))))
    if len(scope) > limits.max_component_atoms + limits.max_separator_atoms:
        raise ResourceLimit(
            f"joined component of {len(scope)} atoms exceeds the configured budget"
        )
    sides: dict[int, list[Component]] = {0: [], 1: []}
    for side, c in members:
        sides[side].append(c)

    def enum_cost(comps: list[Component]) -> float:
        covered = set().union(*(c.scope for c in comps)) if comps else set()
        fill = len(scope) - len(covered)
        cost = float(2**fill)
        for c in comps:
            cost *= len(c.parts)
        return cost

    base, check = (sides[0], sides[1])
    if enum_cost(sides[1]) < enum_cost(sides[0]):
        base, check = sides[1], sides[0]
    if enum_cost(base) > limits.max_parts:
        raise ResourceLimit("component join would enumerate too many candidates")

    bit = {a: i for i, a in enumerate(scope)}
    covered = set().union(*(c.scope for c in base)) if base else set()
    fill_atoms = [a for a in scope if a not in covered]
    checkers = []
    for c in check:
        positions = [bit[a] for a in c.atoms]
        checkers.append((positions, c.parts))

    def lift(c: Component) -> list[int]:
        positions = [bit[a] for a in c.atoms]
        return [
            sum(((p >> i & 1) << pos) for i, pos in enumerate(positions))
            for p in c.parts
        ]

    parts: set[int] = set()
    lifted = [lift(c) for c in base]
    for combo in itertools.product(*lifted) if lifted else [()]:
        core = 0
        for piece in combo:
            core |= piece
        for fill_bits in range(1 << len(fill_atoms)):
            m = core
            for i, at in enumerate(fill_atoms):
                if fill_bits >> i & 1:
                    m |= 1 << bit[at]
            ok = True
            for positions, allowed in checkers:
                proj = sum(((m >> pos & 1) << i) for i, pos in enumerate(positions))
                if proj not in allowed:
                    ok = False
                    break
            if ok:
                parts.add(m)
        if len(parts) > limits.max_parts:
            raise ResourceLimit("component join produced too many parts")
    if not parts:
        raise EmptyIntersection(
            "components over "
            + str(scope)
            + " have no common interpretation"
        )
    return Component(scope, frozenset(parts))


def holds_known(
    m: ModelSet, sent: Sentence, limits: EngineLimits = DEFAULT_LIMITS
) -> bool:
    """Whether an objective sentence is true in every denoted interpretation.

    Atoms outside every component range freely.  A sentence spanning several
    components is evaluated over their product, which is only attempted while
    the candidate count stays inside the configured budget.
    """
    rel = atoms_of(sent)
    touched = [c for c in m.components if rel & c.scope]
    covered: set[int] = set()
    for c in touched:
        covered |= c.scope
    free = sorted(rel - covered)
    if len(free) > limits.max_query_free_atoms:
        raise ResourceLimit("query ranges over too many unconstrained atoms")
    cost = float(1 << len(free))
    for c in touched:
        cost *= len(c.parts)
    if cost > limits.max_parts:
        if len(touched) > 1:
            raise CrossComponentFormula(
                "formula spans components whose joint enumeration exceeds the budget"
            )
        raise ResourceLimit("query enumeration exceeds the budget")

    atoms: tuple[int, ...] = ()
    for c in touched:
        atoms += c.atoms
    atoms += tuple(free)
    bit = {a: i for i, a in enumerate(atoms)}

    if len(atoms) <= 62:
        combined = np.zeros(1, dtype=np.int64)
        shift = 0
        for c in touched:
            parts = np.fromiter(c.parts, dtype=np.int64, count=len(c.parts))
            combined = (combined[:, None] | (parts << shift)[None, :]).ravel()
            shift += len(c.atoms)
        if free:
            fills = np.arange(1 << len(free), dtype=np.int64) << shift
            combined = (combined[:, None] | fills[None, :]).ravel()
        return bool(eval_objective_masks(sent, bit, combined).all())

    f = compile_objective(sent, bit)
    shifts = []
    shift = 0
    for c in touched:
        shifts.append(shift)
        shift += len(c.atoms)
    part_lists = [
        [p << s for p in sorted(c.parts)] for c, s in zip(touched, shifts)
    ]
    part_lists.append([fill << shift for fill in range(1 << len(free))])
    for combo in itertools.product(*part_lists):
        mask = 0
        for piece in combo:
            mask |= piece
        if not f(mask):
            return False
    return True


def holds_not(m: ModelSet, sent: Sentence, limits: EngineLimits = DEFAULT_LIMITS) -> bool:
    """Whether an objective sentence is false in some denoted interpretation.

    Model sets are never empty, so this is the complement of holds_known.
    """
    return not holds_known(m, sent, limits)


def _fold_modalities(
    m: ModelSet, sent: Sentence, limits: EngineLimits
) -> Sentence:
    """Replace modal subsentences by their constant truth value in m."""
    if isinstance(sent, Known):
        inner = _fold_modalities(m, sent.sub, limits)
        return TRUE if holds_known(m, inner, limits) else FALSE
    if isinstance(sent, NotKnown):
        inner = _fold_modalities(m, sent.sub, limits)
        return TRUE if holds_not(m, inner, limits) else FALSE
    if isinstance(sent, Neg):
        return Neg(_fold_modalities(m, sent.sub, limits))
    if isinstance(sent, Conj):
        return conj([_fold_modalities(m, s, limits) for s in sent.subs])
    if isinstance(sent, Disj):
        return disj([_fold_modalities(m, s, limits) for s in sent.subs])
    if isinstance(sent, Implies):
        return Implies(
            _fold_modalities(m, sent.body, limits),
            _fold_modalities(m, sent.head, limits),
        )
    return sent


def satisfies(m: ModelSet, sent: Sentence, limits: EngineLimits = DEFAULT_LIMITS) -> bool:
    """Truth of one sentence in m, with m doubling as the negation context."""
    residue = _fold_modalities(m, sent, limits)
    return holds_known(m, residue, limits)


def satisfies_s5(
    m: ModelSet, sentences: Iterable[Sentence], limits: EngineLimits = DEFAULT_LIMITS
) -> bool:
    """Whether every sentence holds in every denoted interpretation of m."""
    return all(satisfies(m, s, limits) for s in sentences)


def denotation(
    m: ModelSet, universe: Sequence[int], cap: int = 1 << 22
) -> set[frozenset[int]]:
    """Explicit expansion of the denoted set over a finite atom universe."""
    universe = sorted(universe)
    uni = set(universe)
    comps = []
    covered: set[int] = set()
    for c in m.components:
        inside = [a for a in c.atoms if a in uni]
        if len(inside) != len(c.atoms):
            c = c.project(uni) if inside else None
            if c is None:
                continue
        comps.append(c)
        covered |= c.scope
    free = [a for a in universe if a not in covered]
    total = float(2 ** len(free))
    for c in comps:
        total *= len(c.parts)
    if total > cap:
        raise ResourceLimit("denotation expansion exceeds the cap")
    out: set[frozenset[int]] = set()
    part_sets = [[c.set_of(p) for p in sorted(c.parts)] for c in comps]
    for combo in itertools.product(*part_sets) if part_sets else [()]:
        base: frozenset[int] = frozenset().union(*combo) if combo else frozenset()
        for k in range(len(free) + 1):
            for extra in itertools.combinations(free, k):
                out.add(base | frozenset(extra))
    return out


def _split_once(comp: Component) -> list[Component] | None:
    """One independent factor split of a component, or None if none is found.

    A block B is an independent factor exactly when the part count equals the
    product of the counts of the projections onto B and its complement; the
    part set always embeds into that product, so counting suffices.  Blocks
    are grown from a seed atom by repeatedly absorbing an atom whose joint
    projection with the block loses parts against the product, which keeps
    the block inside the seed's true factor.  Jointly dependent but pairwise
    independent scopes (parity constraints) stall the growth and are left
    unsplit, which is sound.
    """
    n = len(comp.atoms)
    if n == 1 or len(comp.parts) == 1:
        return None
    total = len(comp.parts)
    scope = set(comp.atoms)
    single = {a: len(comp.project((a,)).parts) for a in comp.atoms}  # type: ignore[union-attr]
    for seed in comp.atoms:
        block = {seed}
        while len(block) < n:
            rest = tuple(sorted(scope - block))
            pb = comp.project(tuple(sorted(block)))
            pr = comp.project(rest)
            assert pb is not None and pr is not None
            if len(pb.parts) * len(pr.parts) == total:
                return [pb, pr]
            best = None
            best_loss = 0
            for a in rest:
                joint = comp.project(tuple(sorted(block | {a})))
                assert joint is not None
                loss = len(pb.parts) * single[a] - len(joint.parts)
                if loss > best_loss:
                    best_loss = loss
                    best = a
            if best is None:
                break
            block.add(best)
    return None


_FACTOR_PART_CAP = 1 << 14


def _factor_component(comp: Component) -> list[Component]:
    """Split a component into independent factors where that is detectable."""
    if len(comp.parts) > _FACTOR_PART_CAP:
        return [comp]
    out: list[Component] = []
    pending = [comp]
    while pending:
        c = pending.pop()
        split = _split_once(c)
        if split is None:
            out.append(c)
        else:
            pending.extend(split)
    return sorted(out, key=lambda c: c.atoms)


def canonical(m: ModelSet) -> ModelSet:
    """Normal form for denotation comparison: factor maximally, drop free parts."""
    out: list[Component] = []
    for comp in m.components:
        for factor in _factor_component(comp):
            if not factor.is_full():
                out.append(factor)
    return ModelSet(tuple(out))


def model_sets_equal(a: ModelSet, b: ModelSet, cap: int = 1 << 22) -> bool:
    """Whether two factored sets denote the same set of interpretations.

    Canonical forms are compared first; when they disagree structurally the
    constrained scopes are expanded explicitly, which the factoring cap keeps
    rare and the expansion cap keeps bounded.
    """
    ca, cb = canonical(a), canonical(b)
    if ca == cb:
        return True
    universe = sorted(ca.scope | cb.scope)
    return denotation(ca, universe, cap) == denotation(cb, universe, cap)


def render_model_set(m: ModelSet, sig: Signature) -> str:
    lines = []
    for c in m.components:
        names = [str(sig.atoms[a]) for a in c.atoms]
        lines.append("{" + ", ".join(names) + "}: " + str(len(c.parts)) + " parts")
    return "\n".join(lines) if lines else "(unconstrained)"
