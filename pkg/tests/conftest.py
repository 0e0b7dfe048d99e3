import os

import pytest

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, title): acceptance criterion checked by a test")


def pytest_collection_modifyitems(config, items):
    if os.environ.get("SMOOTHSAT_EXTENDED") == "1":
        return
    skip = pytest.mark.skip(reason="set SMOOTHSAT_EXTENDED=1 to run")
    for item in items:
        if "extended" in item.keywords:
            item.add_marker(skip)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when != "call" and not (rep.failed or rep.skipped):
        return
    num, title = mark.args
    entry = _RESULTS.setdefault(num, {"title": title, "status": {}, "notes": {}})
    entry["status"][item.name] = "SKIP" if rep.skipped else "FAIL" if rep.failed else "PASS"
    notes = [v for k, v in item.user_properties if k == "note"]
    if notes:
        entry["notes"][item.name] = notes[-1]


@pytest.fixture
def note(request):
    """Attach a one-line measurement to the criterion summary."""
    def put(text):
        request.node.user_properties.append(("note", text))
    return put


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num, r in sorted(_RESULTS.items()):
        states = set(r["status"].values())
        # skipped parts (opt-in runs) do not fail a criterion that otherwise ran
        status = "FAIL" if "FAIL" in states else "PASS" if "PASS" in states else "SKIP"
        line = f"[{status}] criterion {num}: {r['title']}"
        if r["notes"]:
            line += " | " + "; ".join(r["notes"].values())
        tr.write_line(line)
