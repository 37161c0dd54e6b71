import random
from collections import defaultdict

import pytest

from hiddenlattice.lattice import LatticeBasis
from hiddenlattice.linalg import rank_over_q

_criteria = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k): acceptance criterion number k")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    props = dict(report.user_properties)
    k = props.get("criterion")
    if k is None:
        return
    _criteria[k].append((report.nodeid.split("::")[-1], report.outcome, props.get("detail", "")))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(_criteria):
        runs = _criteria[k]
        ok = all(outcome == "passed" for _, outcome, _ in runs)
        skipped = all(outcome == "skipped" for _, outcome, _ in runs)
        verdict = "SKIP" if skipped else ("PASS" if ok else "FAIL")
        tr.write_line(f"criterion {k}: {verdict}")
        for name, outcome, detail in runs:
            tr.write_line(f"    {name}: {outcome} {detail}".rstrip())


@pytest.fixture
def criterion(request, record_property):
    """Tag the running test with its criterion number and collect a detail line."""
    marker = request.node.get_closest_marker("criterion")
    record_property("criterion", marker.args[0])
    notes = []

    def note(text):
        notes.append(str(text))
        print(text)
        record_property("detail", "; ".join(notes))

    return note


def random_basis(rng, n, m, bound=5):
    """Full-rank n x m integer basis with entries in [-bound, bound]."""
    while True:
        rows = [[rng.randint(-bound, bound) for _ in range(m)] for _ in range(n)]
        if rank_over_q(rows) == n:
            return LatticeBasis(rows)


@pytest.fixture
def rng():
    return random.Random(12345)
