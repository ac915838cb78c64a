"""Concept enumeration (Close-by-One) and the lattice order."""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from .context import Attribute, ContextError, FormalContext, iter_bits


@dataclass(frozen=True)
class FormalConcept:
    """A closed (extent, intent) pair, both held as bitsets."""

    extent_bits: int
    intent_bits: int
    context: FormalContext = field(compare=False, repr=False, default=None)

    @property
    def support(self) -> int:
        return self.extent_bits.bit_count()

    @property
    def extent(self) -> frozenset[str]:
        return self.context.case_ids(self.extent_bits)

    @property
    def intent(self) -> frozenset[Attribute]:
        return self.context.attribute_set(self.intent_bits)

    def sort_key(self) -> tuple[int, ...]:
        return tuple(iter_bits(self.intent_bits))

    def to_dict(self) -> dict:
        ctx = self.context
        return {
            "intent": [ctx.attributes[i].label for i in iter_bits(self.intent_bits)],
            "extent": [ctx.objects[i] for i in iter_bits(self.extent_bits)],
            "support": self.support,
        }


class ConceptSet:
    """Concepts of one context in canonical order (lexicographic sorted intent ids)."""

    def __init__(self, context: FormalContext, concepts: Iterable[FormalConcept]):
        self.context = context
        self.concepts = sorted(concepts, key=FormalConcept.sort_key)
        self._by_intent = {c.intent_bits: c for c in self.concepts}
        if len(self._by_intent) != len(self.concepts):
            raise ValueError("duplicate intents in concept set")

    def __len__(self):
        return len(self.concepts)

    def __iter__(self) -> Iterator[FormalConcept]:
        return iter(self.concepts)

    def __getitem__(self, i):
        return self.concepts[i]

    def __contains__(self, concept) -> bool:
        return getattr(concept, "intent_bits", None) in self._by_intent

    def by_intent(self, intent_bits: int) -> Optional[FormalConcept]:
        return self._by_intent.get(intent_bits)

    def find(self, attributes) -> Optional[FormalConcept]:
        """Concept whose intent is exactly ``attributes``, if present."""
        return self._by_intent.get(self.context.attribute_bits(attributes))

    def top(self) -> Optional[FormalConcept]:
        return self.by_intent(self.context.intent_of(self.context.all_objects))

    def to_json_list(self) -> list[dict]:
        return [c.to_dict() for c in self.concepts]


# -- Close-by-One ------------------------------------------------------------

def _candidates(ctx: FormalContext, extent: int, intent: int, start: int, min_support: int):
    """Attributes j >= start, outside the intent, worth extending by.

    With a positive support threshold the attribute counts inside the extent
    are tallied from the rows, which is far cheaper than testing every column
    on sparse data.
    """
    m = len(ctx.attributes)
    if min_support <= 0:
        return [j for j in range(start, m) if not intent >> j & 1]
    counts: dict[int, int] = {}
    rows = ctx.rows
    for o in iter_bits(extent):
        for a in iter_bits(rows[o] >> start):
            counts[a] = counts.get(a, 0) + 1
    return sorted(
        a + start for a, k in counts.items()
        if k >= min_support and not intent >> (a + start) & 1
    )


def _cbo(ctx: FormalContext, extent: int, intent: int, start: int, min_support: int,
         out: list) -> None:
    # explicit stack keeps deep intents clear of the recursion limit
    stack = [(extent, intent, start)]
    cols = ctx.cols
    while stack:
        extent, intent, start = stack.pop()
        out.append((extent, intent))
        for j in reversed(_candidates(ctx, extent, intent, start, min_support)):
            new_extent = extent & cols[j]
            if new_extent.bit_count() < min_support:
                continue
            new_intent = ctx.intent_of(new_extent)
            below = (1 << j) - 1
            # canonicity: no attribute before j may be added by the closure
            if new_intent & below != intent & below:
                continue
            stack.append((new_extent, new_intent, j + 1))


def _top_branches(ctx: FormalContext, top_extent: int, top_intent: int, min_support: int):
    """First-level CbO children of the top concept, as (extent, intent, next) triples."""
    out = []
    for j in _candidates(ctx, top_extent, top_intent, 0, min_support):
        new_extent = top_extent & ctx.cols[j]
        if new_extent.bit_count() < min_support:
            continue
        new_intent = ctx.intent_of(new_extent)
        below = (1 << j) - 1
        if new_intent & below != top_intent & below:
            continue
        out.append((new_extent, new_intent, j + 1))
    return out


_WORKER_CTX: Optional[FormalContext] = None


def _init_worker(ctx: FormalContext) -> None:
    global _WORKER_CTX
    _WORKER_CTX = ctx


def _run_branches(branches, min_support):
    out: list = []
    for extent, intent, start in branches:
        _cbo(_WORKER_CTX, extent, intent, start, min_support, out)
    return out


def resolve_workers(workers) -> int:
    if workers in (None, "auto"):
        return os.cpu_count() or 1
    workers = int(workers)
    if workers < 1:
        raise ValueError("workers must be >= 1")
    return workers


def enumerate_concepts(ctx: FormalContext, min_support: int = 0, workers=1) -> ConceptSet:
    """All concepts of ``ctx`` whose extent has at least ``min_support`` objects.

    ``workers > 1`` splits the search tree below the top concept across
    processes; the merged result is sorted so output is identical either way.
    """
    if min_support < 0:
        raise ValueError("min_support must be >= 0")
    top_extent = ctx.all_objects
    if top_extent.bit_count() < min_support:
        return ConceptSet(ctx, [])
    top_intent = ctx.intent_of(top_extent)

    pairs: list = [(top_extent, top_intent)]
    branches = _top_branches(ctx, top_extent, top_intent, min_support)
    n_workers = min(resolve_workers(workers), max(len(branches), 1))
    if n_workers <= 1:
        for extent, intent, start in branches:
            _cbo(ctx, extent, intent, start, min_support, pairs)
    else:
        # round-robin so the heavy early branches spread out
        chunks = [branches[i::n_workers] for i in range(n_workers)]
        with ProcessPoolExecutor(n_workers, initializer=_init_worker, initargs=(ctx,)) as pool:
            for part in pool.map(_run_branches, chunks, [min_support] * n_workers):
                pairs.extend(part)
    return ConceptSet(ctx, (FormalConcept(e, i, ctx) for e, i in pairs))


def is_concept(ctx: FormalContext, objects: Iterable[str], attributes) -> bool:
    extent = ctx.object_bits(objects)
    intent = ctx.attribute_bits(attributes)
    return ctx.intent_of(extent) == intent and ctx.extent_of(intent) == extent


def leq(c1: FormalConcept, c2: FormalConcept) -> bool:
    """Subconcept order: extent(c1) is a subset of extent(c2)."""
    if c1.context is not None and c2.context is not None and c1.context is not c2.context:
        raise ContextError("concepts come from different contexts")
    return c1.extent_bits & c2.extent_bits == c1.extent_bits


def covering_edges(cs: ConceptSet) -> list[tuple[FormalConcept, FormalConcept]]:
    """Hasse diagram of ``cs`` as (child, parent) pairs.

    For each concept the strict superconcepts are scanned by increasing
    support; one is a cover iff it does not contain an already accepted cover.
    Edges come out in canonical child order, parents by support then intent.
    """
    ordered = sorted(cs.concepts, key=lambda c: (c.support, c.sort_key()))
    edges = []
    for child in cs.concepts:
        ext = child.extent_bits
        covers: list[FormalConcept] = []
        for cand in ordered:
            ce = cand.extent_bits
            if ce == ext or ce & ext != ext:
                continue
            if any(cov.extent_bits & ce == cov.extent_bits for cov in covers):
                continue
            covers.append(cand)
        edges.extend((child, p) for p in covers)
    return edges
