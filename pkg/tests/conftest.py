import pytest

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when != "call" and rep.passed:
        return
    number, title = mark.args
    ok = rep.passed and not getattr(rep, "wasxfail", False)
    entry = _criteria.setdefault(number, {"title": title, "ok": True, "tests": 0})
    entry["ok"] = entry["ok"] and ok
    entry["tests"] += 1


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        e = _criteria[number]
        status = "PASS" if e["ok"] else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d} {status}  {e['title']}")
