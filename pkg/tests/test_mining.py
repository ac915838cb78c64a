import json
import math
import random

import pytest

from fcapv.context import CaseReport, close_attributes, ingest
from fcapv.lattice import enumerate_concepts
from fcapv.mining import (MiningError, MiningReport, RelationshipKind as K, Thresholds,
                          classify_concept, kind_for_counts, mine, select_strip)

from conftest import random_context


def test_select_strip_reference(reference_ctx):
    strip = select_strip(enumerate_concepts(reference_ctx))
    assert strip.find({"D1", "AE1"}) is not None
    assert strip.find({"F"}) is None
    assert strip.find({"F", "D4", "D5", "AE2"}) is None
    assert {frozenset(a.label for a in c.intent) for c in strip} == {
        frozenset({"D1", "AE1"}), frozenset({"M", "D1", "D3", "AE1"})}


def test_select_strip_empty():
    assert len(select_strip(enumerate_concepts(ingest([]), 3))) == 0


def _concept(labels_by_kind):
    ctx = ingest([CaseReport("x", **labels_by_kind)])
    return close_attributes(ctx, [])


def test_classify_examples():
    assert classify_concept(_concept(dict(drugs={"D1"}, events={"AE1"}))) == (K.SIGNAL, False)
    assert classify_concept(_concept(dict(drugs={"D1", "D2"}, events={"AE1"})))[0] is K.DRUG_INTERACTION
    assert classify_concept(_concept(dict(demographics={"F"}, drugs={"D4", "D5"}, events={"AE2"}))) == \
        (K.DRUG_INTERACTION, True)
    assert classify_concept(_concept(dict(drugs={"D1"}, events={"AE1", "AE2"})))[0] is K.SYNDROME


def test_classify_rejects_outside_strip():
    with pytest.raises(MiningError):
        classify_concept(_concept(dict(demographics={"F"}, drugs={"D1"})))
    with pytest.raises(MiningError):
        kind_for_counts(0, 2)


def test_mine_reference(reference_ctx):
    report = mine(reference_ctx)
    assert (report.total_concepts, report.strip_concepts, report.filtered_concepts) == (7, 2, 1)
    (rel,) = report.relationships
    assert rel.kind is K.SIGNAL
    assert (rel.drugs, rel.events, rel.demographics) == (("D1",), ("AE1",), ())
    assert rel.extent == ("P1", "P2", "P3", "P4")
    assert (rel.table.a, rel.table.b, rel.table.c, rel.table.d) == (4, 0, 0, 4)
    assert rel.stats.prr == math.inf
    assert rel.stats.chi2 == pytest.approx(4.5)
    assert not rel.population_restricted
    assert report.per_kind[K.SIGNAL] == 1 and sum(report.per_kind.values()) == 1


def test_mine_reference_relaxed_keeps_restricted_variant(reference_ctx):
    # {M, D1, D3, AE1}: a=3 b=0 c=1 d=4 -> PRR 5, chi2 32/15
    report = mine(reference_ctx, Thresholds(3, 2.0, 2.0))
    kinds = {(r.drugs, r.demographics): r for r in report.relationships}
    r = kinds[(("D1", "D3"), ("M",))]
    assert r.kind is K.DRUG_INTERACTION and r.population_restricted
    assert r.stats.prr == pytest.approx(5.0)
    assert r.stats.chi2 == pytest.approx(32 / 15)


def test_no_relationship_for_unclosed_pair(reference_ctx):
    for th in (Thresholds(), Thresholds(1, 0.0, 0.0)):
        report = mine(reference_ctx, th)
        for r in report.relationships:
            assert set(r.drugs) | set(r.events) | set(r.demographics) != {"D3", "AE1"}


def test_mine_empty_context():
    report = mine(ingest([]))
    assert (report.total_concepts, report.strip_concepts, report.filtered_concepts) == (0, 0, 0)
    assert report.relationships == ()


def test_single_pair_dataset():
    # degenerate table (n, 0, 0, 0): PRR is infinite but chi2 is 0 on the empty margins
    ctx = ingest([CaseReport(f"c{i}", drugs={"X"}, events={"Y"}) for i in range(4)])
    strip = select_strip(enumerate_concepts(ctx, 3))
    assert len(strip) == 1 and classify_concept(strip[0]) == (K.SIGNAL, False)
    report = mine(ctx)
    assert report.strip_concepts == 1
    assert report.filtered_concepts == 0


def test_single_pair_with_background_is_signal():
    cases = [CaseReport(f"c{i}", drugs={"X"}, events={"Y"}) for i in range(4)]
    cases += [CaseReport(f"z{i}", drugs={"W"}, events={"V"}) for i in range(4)]
    report = mine(ingest(cases))
    sig = [r for r in report.relationships if r.drugs == ("X",)]
    assert len(sig) == 1 and sig[0].kind is K.SIGNAL and sig[0].stats.prr == math.inf


def test_report_round_trip(reference_ctx):
    report = mine(reference_ctx)
    text = json.dumps(report.to_dict())
    assert MiningReport.from_dict(json.loads(text)) == report
    assert '"inf"' in text


def test_csv_export(reference_ctx):
    lines = mine(reference_ctx).to_csv().splitlines()
    assert lines[0] == "kind,drugs,events,demographics,support,a,b,c,d,prr,chi2,population_restricted"
    assert lines[1] == "Signal,D1,AE1,,4,4,0,0,4,inf,4.5,false"


def _dataset(rng):
    return random_context(rng, rng.randint(5, 30), rng.randint(2, 10), rng.uniform(0.1, 0.7))


def _tag_drugs_events(ctx):
    # random contexts tag everything as drugs; turn the odd attributes into events
    cases = []
    for o, case_id in enumerate(ctx.objects):
        labels = [a.label for j, a in enumerate(ctx.attributes) if ctx.incidence(o, j)]
        idx = [int(x[1:]) for x in labels]
        cases.append(CaseReport(case_id, drugs={f"d{i}" for i in idx if i % 2 == 0},
                                events={f"e{i}" for i in idx if i % 2}))
    return ingest(cases)


def test_threshold_monotonicity():
    rng = random.Random(8)
    for _ in range(100):
        ctx = _tag_drugs_events(_dataset(rng))
        t1 = Thresholds(rng.randint(1, 3), rng.uniform(0, 3), rng.uniform(0, 3))
        t2 = Thresholds(t1.min_support + rng.randint(0, 2), t1.min_prr + rng.uniform(0, 2),
                        t1.min_chi2 + rng.uniform(0, 2))
        keys1 = {r.sort_key() for r in mine(ctx, t1).relationships}
        keys2 = {r.sort_key() for r in mine(ctx, t2).relationships}
        assert keys2 <= keys1


def test_report_arithmetic_and_determinism():
    rng = random.Random(9)
    for _ in range(30):
        ctx = _tag_drugs_events(_dataset(rng))
        r1 = mine(ctx, Thresholds(2, 1.0, 1.0))
        assert sum(r1.per_kind.values()) == r1.filtered_concepts == len(r1.relationships)
        assert r1.filtered_concepts <= r1.strip_concepts <= r1.total_concepts
        assert json.dumps(r1.to_dict()) == json.dumps(mine(ctx, Thresholds(2, 1.0, 1.0)).to_dict())
        for rel in r1.relationships:
            assert rel.kind is kind_for_counts(len(rel.drugs), len(rel.events))


def test_extent_mode_never_exceeds_conjunction_a(reference_ctx):
    th = Thresholds(1, 0.0, 0.0)
    conj = {r.sort_key(): r for r in mine(reference_ctx, th).relationships}
    ext = mine(reference_ctx, th, contingency_mode="extent")
    for r in ext.relationships:
        assert r.table.a == r.support
        if r.sort_key() in conj:
            assert r.table.a <= conj[r.sort_key()].table.a
