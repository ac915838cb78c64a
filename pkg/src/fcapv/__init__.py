"""Formal concept analysis for adverse drug event mining."""

__version__ = "0.1.0"

from .context import (Attribute, AttributeKind, CaseReport, ContextError, FormalContext,
                      close_attributes, close_objects, derive_attributes, derive_objects, ingest)
from .lattice import ConceptSet, FormalConcept, covering_edges, enumerate_concepts, is_concept, leq
from .mining import (MiningReport, Relationship, RelationshipKind, Thresholds, classify_concept,
                     mine, select_strip)
from .stats import (ContingencyTable, DisproportionalityResult, apply_mhra, chi_square,
                    contingency_from_concept, prr)
