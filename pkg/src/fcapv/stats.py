"""2x2 disproportionality statistics (PRR, chi-square) and the MHRA rule."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .context import AttributeKind, FormalContext

MIN_PRR = 2.0
MIN_CHI2 = 4.0
MIN_SUPPORT = 3

CORRECTIONS = ("yates", "pearson")
CONTINGENCY_MODES = ("conjunction", "extent")


class StatsError(ValueError):
    pass


@dataclass(frozen=True)
class ContingencyTable:
    """Exposure (drugs) x outcome (events) counts.

    a: exposed with event, b: exposed without, c: unexposed with event,
    d: neither.
    """

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if min(self.a, self.b, self.c, self.d) < 0:
            raise StatsError(f"negative cell in {self}")

    @property
    def n(self) -> int:
        return self.a + self.b + self.c + self.d

    def scaled(self, k: int) -> "ContingencyTable":
        return ContingencyTable(self.a * k, self.b * k, self.c * k, self.d * k)


@dataclass(frozen=True)
class DisproportionalityResult:
    prr: float
    chi2: float
    support: int
    passes_mhra: bool


def contingency_from_concept(ctx: FormalContext, concept, mode: str = "conjunction") -> ContingencyTable:
    """Build the 2x2 table for a concept whose intent holds drugs and events.

    Exposure is the conjunction of every drug in the intent and the outcome
    the conjunction of every event; demographic attributes are ignored.  In
    ``"extent"`` mode ``a`` is the concept support instead of |D' & E'|, so
    demographic restrictions shrink ``a`` while the margins stay fixed.
    """
    if mode not in CONTINGENCY_MODES:
        raise StatsError(f"unknown contingency mode {mode!r}")
    drugs = concept.intent_bits & ctx.kind_mask(AttributeKind.DRUG)
    events = concept.intent_bits & ctx.kind_mask(AttributeKind.ADVERSE_EVENT)
    if not drugs or not events:
        raise StatsError("concept intent needs at least one drug and one adverse event")
    exposed = ctx.extent_of(drugs)
    with_event = ctx.extent_of(events)
    if mode == "conjunction":
        a = (exposed & with_event).bit_count()
    else:
        a = concept.extent_bits.bit_count()
    b = exposed.bit_count() - a
    c = with_event.bit_count() - a
    return ContingencyTable(a, b, c, ctx.n_objects - a - b - c)


def prr(t: ContingencyTable, haldane: bool = False) -> float:
    """Proportional reporting ratio (a/(a+b)) / (c/(c+d)).

    ``haldane`` adds 0.5 to every cell before dividing.
    """
    if t.a + t.b == 0:
        raise StatsError("PRR undefined: no exposed cases (a + b = 0)")
    if haldane:
        a, b, c, d = (x + 0.5 for x in (t.a, t.b, t.c, t.d))
        return (a / (a + b)) / (c / (c + d))
    if t.a == 0:
        return 0.0
    if t.c == 0:
        return math.inf
    return (t.a / (t.a + t.b)) / (t.c / (t.c + t.d))


def chi_square(t: ContingencyTable, correction: str = "yates") -> float:
    """Pearson chi-square on the 2x2 table, Yates-corrected by default.

    Any empty row or column margin gives 0.
    """
    if correction not in CORRECTIONS:
        raise StatsError(f"unknown chi-square correction {correction!r}")
    n = t.n
    rows = (t.a + t.b, t.c + t.d)
    cols = (t.a + t.c, t.b + t.d)
    if n == 0 or 0 in rows or 0 in cols:
        return 0.0
    shift = 0.5 if correction == "yates" else 0.0
    total = 0.0
    for observed, r, c in ((t.a, 0, 0), (t.b, 0, 1), (t.c, 1, 0), (t.d, 1, 1)):
        expected = rows[r] * cols[c] / n
        dev = max(abs(observed - expected) - shift, 0.0)
        total += dev * dev / expected
    return total


def apply_mhra(prr_value: float, chi2: float, support: int,
               min_prr: float = MIN_PRR, min_chi2: float = MIN_CHI2,
               min_support: int = MIN_SUPPORT) -> bool:
    return prr_value > min_prr and chi2 > min_chi2 and support >= min_support


def evaluate(t: ContingencyTable, support: int, min_prr: float = MIN_PRR,
             min_chi2: float = MIN_CHI2, min_support: int = MIN_SUPPORT,
             correction: str = "yates", haldane: bool = False) -> DisproportionalityResult:
    p = prr(t, haldane=haldane)
    x = chi_square(t, correction)
    return DisproportionalityResult(p, x, support, apply_mhra(p, x, support, min_prr, min_chi2, min_support))


def format_float(x: float):
    """JSON-safe float: infinity becomes the string ``"inf"``."""
    return "inf" if math.isinf(x) else x


def parse_float(x) -> float:
    return math.inf if x == "inf" else float(x)
