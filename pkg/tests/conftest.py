"""Per-criterion pass/fail summary for the acceptance tests.

Acceptance tests carry ``@pytest.mark.criterion(n, "title")``; a
criterion passes when every test carrying its number passes.
"""

from collections import OrderedDict

_RESULTS = OrderedDict()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            n, title = m.args
            _RESULTS.setdefault(n, {"title": title, "tests": {}})
            item.user_properties.append(("criterion", n))


def pytest_runtest_logreport(report):
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    tests = _RESULTS[crit]["tests"]
    if report.when == "call" or report.outcome == "failed":
        ok = report.outcome == "passed"
        tests[report.nodeid] = tests.get(report.nodeid, True) and ok
    elif report.when == "setup" and report.outcome == "skipped":
        tests[report.nodeid] = False


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_RESULTS):
        entry = _RESULTS[n]
        tests = entry["tests"]
        if not tests:
            continue
        failed = [nid.split("::")[-1] for nid, ok in tests.items() if not ok]
        status = "PASS" if not failed else "FAIL"
        line = f"criterion {n}: {status}  {entry['title']}  ({len(tests) - len(failed)}/{len(tests)} checks)"
        if failed:
            line += "  failing: " + ", ".join(failed)
        tr.write_line(line)
