import random
from pathlib import Path

import pytest
from hypothesis import strategies as st

from fcapv.context import context_from_bits, ingest
from fcapv.io import read_csv

DATA = Path(__file__).parent / "data"
REFERENCE_CSV = DATA / "reference.csv"


@pytest.fixture
def reference_ctx():
    return ingest(read_csv(REFERENCE_CSV))


def sets_of(ctx):
    """Context rows as {case_id: {label, ...}} for the oracles."""
    return {
        o: {a.label for j, a in enumerate(ctx.attributes) if ctx.incidence(i, j)}
        for i, o in enumerate(ctx.objects)
    }


@st.composite
def random_contexts(draw, max_objects=10, max_attributes=12):
    n = draw(st.integers(0, max_objects))
    m = draw(st.integers(0, max_attributes))
    density = draw(st.floats(0.1, 0.9))
    rng = random.Random(draw(st.integers(0, 2**32)))
    return random_context(rng, n, m, density)


def random_context(rng, n, m, density):
    rows = [sum(1 << j for j in range(m) if rng.random() < density) for _ in range(n)]
    return context_from_bits(rows, m)


ACCEPTANCE_RESULTS: dict = {}


@pytest.fixture
def criterion(request):
    """Record the outcome of one acceptance criterion for the terminal summary."""
    def record(number, title):
        ACCEPTANCE_RESULTS[number] = [title, None]
        request.node._criterion = number
    yield record
    number = getattr(request.node, "_criterion", None)
    if number is not None:
        rep = getattr(request.node, "rep_call", None)
        ACCEPTANCE_RESULTS[number][1] = bool(rep and rep.passed)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        title, ok = ACCEPTANCE_RESULTS[number]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number}: {title}")
