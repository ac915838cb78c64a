"""Formal contexts built from spontaneous case reports.

Objects are case reports, attributes are typed labels (drug, adverse event,
demographic).  The incidence relation is stored twice as packed bitsets:
``rows[o]`` is the attribute set of object ``o`` and ``cols[a]`` is the object
set of attribute ``a``.  Python ints are used as the bitsets.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union


class ContextError(ValueError):
    """Raised for invalid case data or unknown objects/attributes."""


class AttributeKind(enum.IntEnum):
    # order fixes the attribute layout of every context
    DEMOGRAPHIC = 0
    DRUG = 1
    ADVERSE_EVENT = 2


@dataclass(frozen=True, order=True)
class Attribute:
    kind: AttributeKind
    label: str

    def __post_init__(self):
        if not self.label:
            raise ContextError("attribute label must be non-empty")

    def __str__(self):
        return self.label


@dataclass(frozen=True)
class CaseReport:
    case_id: str
    demographics: frozenset = frozenset()
    drugs: frozenset = frozenset()
    events: frozenset = frozenset()

    def __post_init__(self):
        # accept any iterable of labels
        for name in ("demographics", "drugs", "events"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))

    def attributes(self) -> set[Attribute]:
        return (
            {Attribute(AttributeKind.DEMOGRAPHIC, x) for x in self.demographics}
            | {Attribute(AttributeKind.DRUG, x) for x in self.drugs}
            | {Attribute(AttributeKind.ADVERSE_EVENT, x) for x in self.events}
        )


AttributeRef = Union[Attribute, str]


def iter_bits(x: int):
    """Yield the indices of set bits of ``x`` in increasing order."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def bits_of(indices: Iterable[int]) -> int:
    out = 0
    for i in indices:
        out |= 1 << i
    return out


@dataclass(frozen=True, eq=False)
class FormalContext:
    """Binary case x attribute relation, immutable after construction."""

    objects: tuple[str, ...]
    attributes: tuple[Attribute, ...]
    rows: tuple[int, ...]
    cols: tuple[int, ...]
    _object_index: dict = field(repr=False, default_factory=dict)
    _attribute_index: dict = field(repr=False, default_factory=dict)
    _labels: dict = field(repr=False, default_factory=dict)

    def __post_init__(self):
        self._object_index.update({o: i for i, o in enumerate(self.objects)})
        self._attribute_index.update({a: i for i, a in enumerate(self.attributes)})
        for a in self.attributes:
            self._labels.setdefault(a.label, []).append(a)

    @property
    def n_objects(self) -> int:
        return len(self.objects)

    @property
    def n_attributes(self) -> int:
        return len(self.attributes)

    @property
    def all_objects(self) -> int:
        return (1 << len(self.objects)) - 1

    @property
    def all_attributes(self) -> int:
        return (1 << len(self.attributes)) - 1

    def kind_mask(self, kind: AttributeKind) -> int:
        return bits_of(i for i, a in enumerate(self.attributes) if a.kind == kind)

    def incidence(self, obj: int, attr: int) -> bool:
        return bool(self.rows[obj] >> attr & 1)

    # -- id <-> index translation -------------------------------------------

    def object_index(self, case_id: str) -> int:
        try:
            return self._object_index[case_id]
        except KeyError:
            raise ContextError(f"unknown object {case_id!r}") from None

    def attribute_index(self, ref: AttributeRef) -> int:
        if isinstance(ref, Attribute):
            try:
                return self._attribute_index[ref]
            except KeyError:
                raise ContextError(f"unknown attribute {ref!r}") from None
        matches = self._labels.get(ref, [])
        if not matches:
            raise ContextError(f"unknown attribute {ref!r}")
        if len(matches) > 1:
            raise ContextError(f"ambiguous attribute label {ref!r}; pass an Attribute")
        return self._attribute_index[matches[0]]

    def object_bits(self, case_ids: Iterable[str]) -> int:
        return bits_of(self.object_index(o) for o in case_ids)

    def attribute_bits(self, refs: Iterable[AttributeRef]) -> int:
        return bits_of(self.attribute_index(a) for a in refs)

    def case_ids(self, bits: int) -> frozenset[str]:
        return frozenset(self.objects[i] for i in iter_bits(bits))

    def attribute_set(self, bits: int) -> frozenset[Attribute]:
        return frozenset(self.attributes[i] for i in iter_bits(bits))

    # -- derivation on bitsets ----------------------------------------------

    def intent_of(self, extent: int) -> int:
        """Attributes shared by every object of ``extent`` (bitset form)."""
        if not extent:
            return self.all_attributes
        # the intent is a subset of any member row; only test those attributes
        first = (extent & -extent).bit_length() - 1
        cols = self.cols
        out = 0
        for a in iter_bits(self.rows[first]):
            if cols[a] & extent == extent:
                out |= 1 << a
        return out

    def extent_of(self, intent: int) -> int:
        """Objects holding every attribute of ``intent`` (bitset form)."""
        out = self.all_objects
        cols = self.cols
        for a in iter_bits(intent):
            out &= cols[a]
            if not out:
                break
        return out


def ingest(records: Sequence[CaseReport]) -> FormalContext:
    """Encode case reports as a formal context.

    Objects are ordered by case id; attributes by (kind, label), with kinds
    ordered demographic, drug, adverse event.  The result does not depend on
    the order of ``records``.
    """
    seen = set()
    for r in records:
        if not r.case_id:
            raise ContextError("case report with empty case_id")
        if r.case_id in seen:
            raise ContextError(f"duplicate case_id {r.case_id!r}")
        seen.add(r.case_id)
        for name in ("demographics", "drugs", "events"):
            if any(not label for label in getattr(r, name)):
                raise ContextError(f"case {r.case_id!r} has an empty {name} label")

    ordered = sorted(records, key=lambda r: r.case_id)
    per_case = [r.attributes() for r in ordered]
    attributes = tuple(sorted(set().union(*per_case))) if per_case else ()
    index = {a: i for i, a in enumerate(attributes)}

    rows = [bits_of(index[a] for a in attrs) for attrs in per_case]
    cols = [0] * len(attributes)
    for o, attrs in enumerate(per_case):
        for a in attrs:
            cols[index[a]] |= 1 << o
    return FormalContext(
        objects=tuple(r.case_id for r in ordered),
        attributes=attributes,
        rows=tuple(rows),
        cols=tuple(cols),
    )


def context_from_bits(rows: Sequence[int], n_attributes: int) -> FormalContext:
    """Anonymous context over objects ``o0..`` and attributes ``a0..``.

    Handy for tests and benchmarks; every attribute is tagged as a drug.
    """
    attributes = tuple(Attribute(AttributeKind.DRUG, f"a{j}") for j in range(n_attributes))
    cols = [0] * n_attributes
    for o, row in enumerate(rows):
        if row >> n_attributes:
            raise ContextError(f"row {o} references attributes beyond {n_attributes}")
        for a in iter_bits(row):
            cols[a] |= 1 << o
    return FormalContext(
        objects=tuple(f"o{i}" for i in range(len(rows))),
        attributes=attributes,
        rows=tuple(rows),
        cols=tuple(cols),
    )


# -- derivation operators on ids ---------------------------------------------

def derive_objects(ctx: FormalContext, objects: Iterable[str]) -> frozenset[Attribute]:
    """X' : attributes common to every case in ``objects``."""
    return ctx.attribute_set(ctx.intent_of(ctx.object_bits(objects)))


def derive_attributes(ctx: FormalContext, attributes: Iterable[AttributeRef]) -> frozenset[str]:
    """Y' : cases holding every attribute in ``attributes``."""
    return ctx.case_ids(ctx.extent_of(ctx.attribute_bits(attributes)))


def close_attributes(ctx: FormalContext, attributes: Iterable[AttributeRef]):
    """Return the concept ``(Y', Y'')`` generated by ``attributes``."""
    from .lattice import FormalConcept

    extent = ctx.extent_of(ctx.attribute_bits(attributes))
    return FormalConcept(extent, ctx.intent_of(extent), ctx)


def close_objects(ctx: FormalContext, objects: Iterable[str]):
    """Return the concept ``(X'', X')`` generated by ``objects``."""
    from .lattice import FormalConcept

    intent = ctx.intent_of(ctx.object_bits(objects))
    return FormalConcept(ctx.extent_of(intent), intent, ctx)
