"""Minimal-change updates of factored model sets by classical theories.

Updating a set of interpretations M by a theory T keeps, for every starting
interpretation in M, those models of T that change a minimal set of atoms.
Changes are compared by inclusion of the changed-atom sets; comparing the
changes predicate by predicate gives the same order, because the changed
atoms of different predicates never overlap.

The work is organised around the co-occurrence structure of the theory: a
small separator of high-degree atoms is fixed by enumeration, after which
the remaining sentences fall apart into blocks that can be enumerated and
minimised independently and recombined per separator valuation.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import EmptyIntersection, EmptyUpdate, ResourceLimit
from .interp import (
    Atom,
    Component,
    Conj,
    DEFAULT_LIMITS,
    Disj,
    EngineLimits,
    FALSE,
    Implies,
    ModelSet,
    Neg,
    Sentence,
    TRUE,
    atoms_of,
    conj,
    disj,
    eval_objective_masks,
)

_LONG_BITS = 62


def substitute(sent: Sentence, assignment: Mapping[int, bool]) -> Sentence:
    """Fold assigned atoms to constants and simplify what remains."""
    if isinstance(sent, Atom):
        if sent.index in assignment:
            return TRUE if assignment[sent.index] else FALSE
        return sent
    if isinstance(sent, Neg):
        sub = substitute(sent.sub, assignment)
        if sub == TRUE:
            return FALSE
        if sub == FALSE:
            return TRUE
        return Neg(sub)
    if isinstance(sent, Conj):
        return conj([substitute(s, assignment) for s in sent.subs])
    if isinstance(sent, Disj):
        return disj([substitute(s, assignment) for s in sent.subs])
    if isinstance(sent, Implies):
        body = substitute(sent.body, assignment)
        head = substitute(sent.head, assignment)
        if body == FALSE or head == TRUE:
            return TRUE
        if body == TRUE:
            return head
        if head == FALSE:
            return Neg(body)
        return Implies(body, head)
    raise ValueError(f"sentence is not objective: {sent!r}")


def _popcount_array(arr: np.ndarray) -> np.ndarray:
    fn = getattr(np, "bitwise_count", None)
    if fn is not None:
        return fn(arr).astype(np.int64)
    out = np.zeros(arr.shape, dtype=np.int64)
    work = arr.copy()
    while work.any():
        out += work & 1
        work >>= 1
    return out


def _union_find_groups(clusters: Iterable[Iterable[int]]) -> list[set[int]]:
    parent: dict[int, int] = {}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for cluster in clusters:
        cluster = list(cluster)
        for a in cluster:
            parent.setdefault(a, a)
        for a in cluster[1:]:
            ra, rb = find(cluster[0]), find(a)
            if ra != rb:
                parent[ra] = rb
    groups: dict[int, set[int]] = {}
    for a in parent:
        groups.setdefault(find(a), set()).add(a)
    return list(groups.values())


# ---------------------------------------------------------------------------
# theory decomposition


class _Decomposition:
    """Separator plus independent sentence blocks for one atom group."""

    def __init__(self, sentences: Sequence[Sentence], limits: EngineLimits) -> None:
        sent_atoms = [atoms_of(s) for s in sentences]
        separator: set[int] = set()
        while True:
            blocks = _union_find_groups(
                [s - separator for s in sent_atoms if s - separator]
            )
            oversized = set().union(
                *(b for b in blocks if len(b) > limits.max_component_atoms)
            ) if any(len(b) > limits.max_component_atoms for b in blocks) else set()
            if not oversized:
                break
            if len(separator) >= limits.max_separator_atoms:
                raise ResourceLimit(
                    "theory needs a larger separator than the configured budget"
                )
            degree: dict[int, int] = {}
            for s in sent_atoms:
                for a in s - separator:
                    if a in oversized:
                        degree[a] = degree.get(a, 0) + 1
            separator.add(min(degree, key=lambda a: (-degree[a], a)))
        self.separator = tuple(sorted(separator))
        self.blocks = sorted((tuple(sorted(b)) for b in blocks), key=lambda b: b[0])
        block_of: dict[int, int] = {}
        for j, b in enumerate(self.blocks):
            for a in b:
                block_of[a] = j
        self.block_sentences: list[list[Sentence]] = [[] for _ in self.blocks]
        self.guards: list[Sentence] = []
        for sent, rel in zip(sentences, sent_atoms):
            outside = rel - separator
            if outside:
                self.block_sentences[block_of[next(iter(outside))]].append(sent)
            else:
                self.guards.append(sent)

    @property
    def atoms(self) -> tuple[int, ...]:
        out = set(self.separator)
        for b in self.blocks:
            out |= set(b)
        return tuple(sorted(out))


class _GroupSolver:
    """Per-separator-valuation block model tables in group bit space."""

    def __init__(
        self,
        group_atoms: tuple[int, ...],
        sentences: Sequence[Sentence],
        limits: EngineLimits,
    ) -> None:
        if len(group_atoms) > _LONG_BITS:
            raise ResourceLimit(
                f"group of {len(group_atoms)} atoms exceeds the mask width"
            )
        self.group_atoms = group_atoms
        self.pos = {a: i for i, a in enumerate(group_atoms)}
        self.limits = limits
        self.dec = _Decomposition(sentences, limits)
        self.sep_bits = [self.pos[a] for a in self.dec.separator]
        self.sep_mask = 0
        for b in self.sep_bits:
            self.sep_mask |= 1 << b
        self.block_masks = []
        for block in self.dec.blocks:
            m = 0
            for a in block:
                m |= 1 << self.pos[a]
            self.block_masks.append(m)
        covered = self.sep_mask
        for m in self.block_masks:
            covered |= m
        self.inert_mask = ((1 << len(group_atoms)) - 1) & ~covered
        self._tables: dict[tuple[int, int], np.ndarray] = {}
        self._alive: dict[int, bool] = {}

    def sep_value_mask(self, e: int) -> int:
        m = 0
        for i, b in enumerate(self.sep_bits):
            if e >> i & 1:
                m |= 1 << b
        return m

    def _assignment(self, e: int) -> dict[int, bool]:
        return {a: bool(e >> i & 1) for i, a in enumerate(self.dec.separator)}

    def alive(self, e: int) -> bool:
        if e not in self._alive:
            assign = self._assignment(e)
            ok = all(substitute(g, assign) == TRUE for g in self.dec.guards)
            self._alive[e] = ok
        return self._alive[e]

    def block_models(self, j: int, e: int) -> np.ndarray:
        """Models of block j under separator valuation e, in group bit space."""
        key = (j, e)
        if key not in self._tables:
            block = self.dec.blocks[j]
            assign = self._assignment(e)
            local_bit = {a: i for i, a in enumerate(block)}
            masks = np.arange(1 << len(block), dtype=np.int64)
            ok = np.ones(masks.shape, dtype=bool)
            for s in self.dec.block_sentences[j]:
                ok &= eval_objective_masks(substitute(s, assign), local_bit, masks)
            local = masks[ok]
            lifted = np.zeros(local.shape, dtype=np.int64)
            for i, a in enumerate(block):
                lifted |= ((local >> i) & 1) << self.pos[a]
            self._tables[key] = lifted
        return self._tables[key]

    def model_parts(self) -> frozenset[int]:
        """All models of the theory over the group, as explicit part masks."""
        chunks = []
        total = 0
        for e in range(1 << len(self.sep_bits)):
            if not self.alive(e):
                continue
            arrays = [self.block_models(j, e) for j in range(len(self.dec.blocks))]
            if any(a.size == 0 for a in arrays):
                continue
            count = 1
            for a in arrays:
                count *= a.size
            total += count
            if total > self.limits.max_parts:
                raise ResourceLimit("theory has too many models to enumerate")
            combined = np.array([self.sep_value_mask(e)], dtype=np.int64)
            for a in arrays:
                combined = (combined[:, None] | a[None, :]).ravel()
            chunks.append(combined)
        if not chunks:
            raise EmptyIntersection("theory has no classical models")
        return frozenset(int(x) for x in np.concatenate(chunks))


def _minimal_antichain(pairs: dict[int, int]) -> list[tuple[int, int]]:
    """Pairs whose diff key is inclusion-minimal among all diff keys."""
    kept: list[tuple[int, int]] = []
    for d in sorted(pairs, key=lambda d: (d.bit_count(), d)):
        if any(k & ~d == 0 for k, _ in kept):
            continue
        kept.append((d, pairs[d]))
    return kept


class _UpdateSolver(_GroupSolver):
    """Adds per-start-point minimisation on top of the block tables."""

    def __init__(
        self,
        group_atoms: tuple[int, ...],
        sentences: Sequence[Sentence],
        limits: EngineLimits,
    ) -> None:
        super().__init__(group_atoms, sentences, limits)
        self._antichains: dict[tuple[int, int, int], list[tuple[int, int]]] = {}

    def _block_antichain(self, j: int, e: int, i_block: int) -> list[tuple[int, int]]:
        """Minimal (diff, model) pairs for one block given the start point."""
        key = (j, e, i_block)
        if key not in self._antichains:
            models = self.block_models(j, e)
            if models.size == 0:
                self._antichains[key] = []
            else:
                diffs = models ^ i_block
                order = np.argsort(_popcount_array(diffs), kind="stable")
                kept: list[tuple[int, int]] = []
                for idx in order:
                    d = int(diffs[idx])
                    if any(k & ~d == 0 for k, _ in kept):
                        continue
                    kept.append((d, int(models[idx])))
                self._antichains[key] = kept
        return self._antichains[key]

    def updated_models(self, start: int) -> list[int]:
        """Models of the theory at minimal change from one interpretation."""
        candidates: dict[int, int] = {}
        for e in range(1 << len(self.sep_bits)):
            if not self.alive(e):
                continue
            d_sep = (start & self.sep_mask) ^ self.sep_value_mask(e)
            chains = []
            dead = False
            for j in range(len(self.dec.blocks)):
                chain = self._block_antichain(j, e, start & self.block_masks[j])
                if not chain:
                    dead = True
                    break
                chains.append(chain)
            if dead:
                continue
            base = (start & self.inert_mask) | self.sep_value_mask(e)
            for combo in itertools.product(*chains):
                d = d_sep
                model = base
                for dj, mj in combo:
                    d |= dj
                    model |= mj
                candidates.setdefault(d, model)
        return [model for _, model in _minimal_antichain(candidates)]


# ---------------------------------------------------------------------------
# public entry points


def theory_model_set(
    sentences: Sequence[Sentence], limits: EngineLimits = DEFAULT_LIMITS
) -> ModelSet:
    """Classical models of a theory as a factored set, free off-theory.

    Raises EmptyIntersection when the theory has no models.
    """
    sent_atoms = [atoms_of(s) for s in sentences]
    constant_false = [
        s for s, rel in zip(sentences, sent_atoms) if not rel and substitute(s, {}) != TRUE
    ]
    if constant_false:
        raise EmptyIntersection("theory has no classical models")
    groups = _union_find_groups([rel for rel in sent_atoms if rel])
    comps = []
    for group in sorted(groups, key=min):
        in_group = [
            s for s, rel in zip(sentences, sent_atoms) if rel and rel <= group
        ]
        atoms = tuple(sorted(group))
        solver = _GroupSolver(atoms, in_group, limits)
        comps.append(Component(atoms, solver.model_parts()))
    return ModelSet(tuple(comps))


def _expand_starts(
    m_comps: Sequence[Component],
    group_atoms: tuple[int, ...],
    limits: EngineLimits,
) -> np.ndarray:
    """All interpretations of the group consistent with the given components."""
    pos = {a: i for i, a in enumerate(group_atoms)}
    covered: set[int] = set()
    count = 1
    for c in m_comps:
        covered |= c.scope
        count *= len(c.parts)
    free = [a for a in group_atoms if a not in covered]
    count <<= len(free)
    if count > limits.max_parts:
        raise ResourceLimit("update start set is too large to enumerate")
    starts = np.zeros(1, dtype=np.int64)
    for c in m_comps:
        parts = np.fromiter(c.parts, dtype=np.int64, count=len(c.parts))
        lifted = np.zeros(parts.shape, dtype=np.int64)
        for i, a in enumerate(c.atoms):
            lifted |= ((parts >> i) & 1) << pos[a]
        starts = (starts[:, None] | lifted[None, :]).ravel()
    if free:
        fills = np.arange(1 << len(free), dtype=np.int64)
        lifted = np.zeros(fills.shape, dtype=np.int64)
        for i, a in enumerate(free):
            lifted |= ((fills >> i) & 1) << pos[a]
        starts = (starts[:, None] | lifted[None, :]).ravel()
    return starts


def update_with_theory(
    m: ModelSet,
    sentences: Sequence[Sentence],
    limits: EngineLimits = DEFAULT_LIMITS,
) -> ModelSet:
    """Minimal-change update of a factored set by a classical theory.

    Components of the start set and sentence scopes are first merged into
    independent groups, which keeps both sides saturated with respect to the
    grouping; each group is then updated on its own.  Raises EmptyUpdate when
    the theory rules out every result.
    """
    sent_atoms = [atoms_of(s) for s in sentences]
    constant_false = [
        s for s, rel in zip(sentences, sent_atoms) if not rel and substitute(s, {}) != TRUE
    ]
    if constant_false:
        raise EmptyUpdate("updating theory has no classical models")
    clusters = [rel for rel in sent_atoms if rel]
    clusters.extend(c.scope for c in m.components)
    groups = _union_find_groups(clusters)
    out: list[Component] = []
    for group in sorted(groups, key=min):
        atoms = tuple(sorted(group))
        in_group = [s for s, rel in zip(sentences, sent_atoms) if rel and rel <= group]
        m_comps = [c for c in m.components if c.scope <= group]
        if not in_group:
            out.extend(m_comps)
            continue
        if not m_comps:
            # the start set is free here, so every model of the theory is
            # reachable without change outside the group
            solver = _GroupSolver(atoms, in_group, limits)
            try:
                out.append(Component(atoms, solver.model_parts()))
            except EmptyIntersection:
                raise EmptyUpdate("updating theory has no classical models")
            continue
        solver = _UpdateSolver(atoms, in_group, limits)
        starts = _expand_starts(m_comps, atoms, limits)
        parts: set[int] = set()
        for start in starts.tolist():
            parts.update(solver.updated_models(start))
            if len(parts) > limits.max_parts:
                raise ResourceLimit("update produced too many distinct results")
        if not parts:
            raise EmptyUpdate("updating theory has no classical models")
        out.append(Component(atoms, frozenset(parts)))
    return ModelSet(tuple(out))


def sequence_update_model(
    stage_theories: Sequence[Sequence[Sentence]],
    limits: EngineLimits = DEFAULT_LIMITS,
) -> ModelSet:
    """Left fold of minimal-change updates over a sequence of theories.

    The fold starts from the unconstrained set, so a single theory just
    yields its own models.
    """
    current = ModelSet(())
    for stage, sentences in enumerate(stage_theories):
        try:
            current = update_with_theory(current, sentences, limits)
        except EmptyUpdate:
            raise EmptyUpdate(f"stage {stage} has no classical models")
    return current
