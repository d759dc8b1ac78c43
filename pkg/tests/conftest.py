"""Print one PASS/FAIL line per acceptance criterion at the end of the run."""

_CRITERIA = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if not name.startswith("test_criterion_"):
        return
    if report.when == "call" or report.failed:
        _CRITERIA.setdefault(name, report.outcome)
        if report.failed:
            _CRITERIA[name] = "failed"


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")

    def number(name):
        return int(name.split("_")[2])

    for name in sorted(_CRITERIA, key=number):
        verdict = "PASS" if _CRITERIA[name] == "passed" else "FAIL"
        label = " ".join(name.split("_")[3:])
        terminalreporter.write_line(f"{verdict}  criterion {number(name)}: {label}")
