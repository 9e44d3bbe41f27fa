import pytest

_CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and not rep.failed):
        return
    number, title = mark.args
    _CRITERIA[number] = (title, rep.outcome, getattr(item, "detail", ""))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, outcome, detail = _CRITERIA[number]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        line = f"[{verdict}] criterion {number}: {title}"
        terminalreporter.write_line(line + (f"  ({detail})" if detail else ""))


@pytest.fixture
def report(request):
    """Attach a one-line detail string to the criterion summary."""

    def record(text):
        request.node.detail = text
        print(f"\n{request.node.name}: {text}")

    return record
