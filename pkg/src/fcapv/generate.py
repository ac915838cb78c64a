"""Synthetic spontaneous-report datasets with planted drug -> event associations."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SEXES = ("F", "M")
AGE_BANDS = ("0-17", "18-44", "45-64", "65-74", "75-84", "85+")


@dataclass(frozen=True)
class Plant:
    drug: str
    event: str
    count: int

    @classmethod
    def parse(cls, text: str) -> "Plant":
        """Parse ``DRUG:EVENT:COUNT``."""
        try:
            drug, event, count = text.rsplit(":", 2)
            plant = cls(drug, event, int(count))
        except ValueError:
            raise ValueError(f"bad planted association {text!r}; expected DRUG:EVENT:COUNT") from None
        if not drug or not event or plant.count < 1:
            raise ValueError(f"bad planted association {text!r}")
        return plant


def drug_label(i: int) -> str:
    return f"DRUG{i:04d}"


def event_label(i: int) -> str:
    return f"AE{i:04d}"


def generate_cases(n_cases: int, n_drugs: int, n_events: int, density: float,
                   planted=(), seed: int = 0, demographics: bool = True) -> list[dict]:
    """Random case rows as dicts (see :func:`fcapv.io.write_csv`).

    Each case takes every drug and every event independently with probability
    ``density``; each planted pair is then added to ``count`` distinct cases
    drawn uniformly.  Planted labels need not be in the background vocabulary.
    """
    if min(n_cases, n_drugs, n_events) < 1:
        raise ValueError("case, drug and event counts must be >= 1")
    if not 0.0 < density < 1.0:
        raise ValueError(f"density must lie in (0, 1), got {density}")
    rng = np.random.default_rng(seed)
    drug_hits = rng.random((n_cases, n_drugs)) < density
    event_hits = rng.random((n_cases, n_events)) < density
    drugs = [{drug_label(j) for j in np.flatnonzero(row)} for row in drug_hits]
    events = [{event_label(j) for j in np.flatnonzero(row)} for row in event_hits]
    sexes = rng.integers(len(SEXES), size=n_cases)
    ages = rng.integers(len(AGE_BANDS), size=n_cases)

    for plant in planted:
        if plant.count > n_cases:
            raise ValueError(f"cannot plant {plant.count} cases among {n_cases}")
        for case in rng.choice(n_cases, size=plant.count, replace=False):
            drugs[case].add(plant.drug)
            events[case].add(plant.event)

    width = len(str(n_cases))
    return [
        {
            "case_id": f"C{i + 1:0{width}d}",
            "sex": SEXES[sexes[i]] if demographics else "",
            "age_band": AGE_BANDS[ages[i]] if demographics else "",
            "drugs": sorted(drugs[i]),
            "events": sorted(events[i]),
        }
        for i in range(n_cases)
    ]
