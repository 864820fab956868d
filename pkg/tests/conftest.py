import sys
from collections import OrderedDict
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA: "OrderedDict[int, dict]" = OrderedDict()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    entry = _CRITERIA.setdefault(number, {"title": title, "passed": True, "tests": [], "notes": []})
    ok = call.excinfo is None
    entry["passed"] &= ok
    entry["tests"].append((item.name, ok))
    for key, value in item.user_properties:
        if key == "measured":
            entry["notes"].append(value)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        status = "PASS" if entry["passed"] else "FAIL"
        tr.write_line(f"criterion {number:2d} [{status}] {entry['title']}")
        for note in entry["notes"]:
            tr.write_line(f"    {note}")


@pytest.fixture
def measured(record_property):
    """Attach a measured-value note shown under the criterion's summary line."""
    def note(text: str) -> None:
        record_property("measured", text)
    return note


@pytest.fixture(scope="session")
def bench_spec():
    from lmg_lab import BENCHMARK, solve

    return solve(BENCHMARK)


@pytest.fixture(scope="session")
def level_systems(bench_spec):
    """Benchmark truncations keyed by level count."""
    from lmg_lab import BENCHMARK, sign_observable, truncate

    q = sign_observable(BENCHMARK.n_spins)
    return {n: truncate(bench_spec, q, n) for n in (2, 3, 4, 5, 10)}
