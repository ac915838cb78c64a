"""Brute-force reference implementations, deliberately independent of fcapv internals."""
from __future__ import annotations

from itertools import combinations


def powerset(items):
    items = list(items)
    for k in range(len(items) + 1):
        yield from combinations(items, k)


def concepts_by_powerset(rows: dict, attributes) -> set:
    """All (extent, intent) pairs: close every attribute subset and deduplicate.

    ``rows`` maps object -> set of attributes.
    """
    attributes = frozenset(attributes)
    out = set()
    for subset in powerset(sorted(attributes)):
        ys = set(subset)
        extent = frozenset(o for o, row in rows.items() if ys <= row)
        intent = attributes
        for o in extent:
            intent = intent & rows[o]
        out.add((extent, frozenset(intent)))
    return out


def hasse_edges(concepts) -> set:
    """Transitive reduction of extent inclusion, O(n^3)."""
    concepts = list(concepts)
    less = {(c1, c2) for c1 in concepts for c2 in concepts if c1[0] < c2[0]}
    return {
        (c1, c2) for c1, c2 in less
        if not any((c1, c3) in less and (c3, c2) in less for c3 in concepts)
    }


def yates_closed_form(a, b, c, d) -> float:
    """n * max(|ad - bc| - n/2, 0)^2 / (r1 r2 c1 c2); 0 on an empty margin."""
    n = a + b + c + d
    denom = (a + b) * (c + d) * (a + c) * (b + d)
    if denom == 0:
        return 0.0
    dev = max(abs(a * d - b * c) - n / 2, 0.0)
    return n * dev * dev / denom


def pearson_closed_form(a, b, c, d) -> float:
    n = a + b + c + d
    denom = (a + b) * (c + d) * (a + c) * (b + d)
    if denom == 0:
        return 0.0
    return n * (a * d - b * c) ** 2 / denom
