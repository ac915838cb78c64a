"""Strip selection, MHRA filtering and relationship classification."""
from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, field

from .context import AttributeKind, FormalContext, iter_bits
from .lattice import ConceptSet, FormalConcept, enumerate_concepts
from .stats import (
    MIN_CHI2, MIN_PRR, MIN_SUPPORT, ContingencyTable, DisproportionalityResult,
    StatsError, contingency_from_concept, evaluate, format_float, parse_float,
)

# Headline counts of the original study (3,249 French case reports).  The
# source database is confidential, so these are reference values only.
PAPER_REFERENCE_COUNTS = {
    "total_concepts": 13178,
    "strip_concepts": 842,
    "filtered_concepts": 593,
    "per_kind": {
        "Signal": 360,
        "DrugInteraction": 110,
        "Syndrome": 56,
        "ComplexInteraction": 42,
        "ComplexSyndrome": 25,
    },
}


class RelationshipKind(enum.Enum):
    SIGNAL = "Signal"
    DRUG_INTERACTION = "DrugInteraction"
    SYNDROME = "Syndrome"
    COMPLEX_INTERACTION = "ComplexInteraction"
    COMPLEX_SYNDROME = "ComplexSyndrome"


KIND_ORDER = {k: i for i, k in enumerate(RelationshipKind)}


class MiningError(ValueError):
    pass


@dataclass(frozen=True)
class Thresholds:
    min_support: int = MIN_SUPPORT
    min_prr: float = MIN_PRR
    min_chi2: float = MIN_CHI2

    def __post_init__(self):
        if self.min_support < 0 or self.min_prr < 0 or self.min_chi2 < 0:
            raise MiningError(f"thresholds must be non-negative: {self}")


def kind_for_counts(n_drugs: int, n_events: int) -> RelationshipKind:
    if n_drugs < 1 or n_events < 1:
        raise MiningError(f"need >= 1 drug and >= 1 event, got {n_drugs} and {n_events}")
    if n_events == 1:
        if n_drugs == 1:
            return RelationshipKind.SIGNAL
        if n_drugs == 2:
            return RelationshipKind.DRUG_INTERACTION
        return RelationshipKind.COMPLEX_INTERACTION
    if n_drugs == 1:
        return RelationshipKind.SYNDROME
    return RelationshipKind.COMPLEX_SYNDROME


def _split_intent(ctx: FormalContext, intent_bits: int):
    parts = {k: [] for k in AttributeKind}
    for i in iter_bits(intent_bits):
        a = ctx.attributes[i]
        parts[a.kind].append(a.label)
    return (
        tuple(sorted(parts[AttributeKind.DRUG])),
        tuple(sorted(parts[AttributeKind.ADVERSE_EVENT])),
        tuple(sorted(parts[AttributeKind.DEMOGRAPHIC])),
    )


def classify_concept(concept: FormalConcept) -> tuple[RelationshipKind, bool]:
    """Table kind of a drug/event concept and whether it is population-restricted."""
    drugs, events, demographics = _split_intent(concept.context, concept.intent_bits)
    return kind_for_counts(len(drugs), len(events)), bool(demographics)


def select_strip(cs: ConceptSet, min_support: int = MIN_SUPPORT) -> ConceptSet:
    """Concepts mentioning at least one drug and one event, with enough support."""
    ctx = cs.context
    drug_mask = ctx.kind_mask(AttributeKind.DRUG)
    event_mask = ctx.kind_mask(AttributeKind.ADVERSE_EVENT)
    kept = [
        c for c in cs
        if c.support >= min_support and c.intent_bits & drug_mask and c.intent_bits & event_mask
    ]
    return ConceptSet(ctx, kept)


@dataclass(frozen=True)
class Relationship:
    kind: RelationshipKind
    drugs: tuple[str, ...]
    events: tuple[str, ...]
    demographics: tuple[str, ...]
    extent: tuple[str, ...]
    table: ContingencyTable
    stats: DisproportionalityResult

    @property
    def support(self) -> int:
        return self.stats.support

    @property
    def population_restricted(self) -> bool:
        return bool(self.demographics)

    def sort_key(self):
        return (KIND_ORDER[self.kind], self.drugs, self.events, self.demographics)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "drugs": list(self.drugs),
            "events": list(self.events),
            "demographics": list(self.demographics),
            "extent": list(self.extent),
            "support": self.support,
            "a": self.table.a,
            "b": self.table.b,
            "c": self.table.c,
            "d": self.table.d,
            "prr": format_float(self.stats.prr),
            "chi2": self.stats.chi2,
            "passes_mhra": self.stats.passes_mhra,
            "population_restricted": self.population_restricted,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Relationship":
        return cls(
            kind=RelationshipKind(d["kind"]),
            drugs=tuple(d["drugs"]),
            events=tuple(d["events"]),
            demographics=tuple(d["demographics"]),
            extent=tuple(d["extent"]),
            table=ContingencyTable(d["a"], d["b"], d["c"], d["d"]),
            stats=DisproportionalityResult(
                parse_float(d["prr"]), float(d["chi2"]), d["support"], d["passes_mhra"]
            ),
        )


@dataclass(frozen=True)
class MiningReport:
    total_concepts: int
    strip_concepts: int
    filtered_concepts: int
    per_kind: dict = field(default_factory=dict)
    relationships: tuple[Relationship, ...] = ()

    def to_dict(self) -> dict:
        return {
            "total_concepts": self.total_concepts,
            "strip_concepts": self.strip_concepts,
            "filtered_concepts": self.filtered_concepts,
            "per_kind": {k.value: self.per_kind.get(k, 0) for k in RelationshipKind},
            "relationships": [r.to_dict() for r in self.relationships],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MiningReport":
        return cls(
            total_concepts=d["total_concepts"],
            strip_concepts=d["strip_concepts"],
            filtered_concepts=d["filtered_concepts"],
            per_kind={RelationshipKind(k): v for k, v in d["per_kind"].items()},
            relationships=tuple(Relationship.from_dict(r) for r in d["relationships"]),
        )

    def summary_lines(self) -> list[str]:
        lines = [
            f"Total concepts                     {self.total_concepts}",
            f"{{D1..Dn; AE1..AEm}}                 {self.strip_concepts}",
            f"  with PRR, chi2, support filter   {self.filtered_concepts}",
        ]
        for k in RelationshipKind:
            lines.append(f"    {k.value:<30} {self.per_kind.get(k, 0)}")
        return lines

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["kind", "drugs", "events", "demographics", "support",
                    "a", "b", "c", "d", "prr", "chi2", "population_restricted"])
        for r in self.relationships:
            w.writerow([
                r.kind.value, ";".join(r.drugs), ";".join(r.events), ";".join(r.demographics),
                r.support, r.table.a, r.table.b, r.table.c, r.table.d,
                format_float(r.stats.prr), repr(r.stats.chi2), str(r.population_restricted).lower(),
            ])
        return buf.getvalue()


def mine(ctx: FormalContext, thresholds: Thresholds = Thresholds(), *,
         correction: str = "yates", contingency_mode: str = "conjunction",
         haldane: bool = False, workers=1, concepts: ConceptSet | None = None) -> MiningReport:
    """Enumerate the iceberg lattice and keep the MHRA-significant drug/event concepts.

    ``total_concepts`` counts the concepts enumerated at ``min_support``;
    pass a precomputed ``concepts`` set (e.g. the full lattice) to count
    against that instead.
    """
    if concepts is None:
        concepts = enumerate_concepts(ctx, thresholds.min_support, workers=workers)
    strip = select_strip(concepts, thresholds.min_support)
    relationships = []
    for concept in strip:
        table = contingency_from_concept(ctx, concept, contingency_mode)
        try:
            result = evaluate(table, concept.support, thresholds.min_prr, thresholds.min_chi2,
                              thresholds.min_support, correction, haldane)
        except StatsError:
            # extent mode can leave no exposed cases; such a concept never passes
            continue
        if not result.passes_mhra:
            continue
        kind, _ = classify_concept(concept)
        drugs, events, demographics = _split_intent(ctx, concept.intent_bits)
        relationships.append(Relationship(
            kind, drugs, events, demographics,
            tuple(ctx.objects[i] for i in iter_bits(concept.extent_bits)),
            table, result,
        ))
    relationships.sort(key=Relationship.sort_key)
    per_kind = {k: 0 for k in RelationshipKind}
    for r in relationships:
        per_kind[r.kind] += 1
    return MiningReport(len(concepts), len(strip), len(relationships), per_kind, tuple(relationships))
