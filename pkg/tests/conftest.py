import re

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")
_results = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    key = (int(m.group(1)), m.group(2))
    detail = dict(report.user_properties).get("detail", "")
    if report.when == "call" or report.outcome != "passed":
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        if key not in _results or status != "PASS":
            _results[key] = (status, detail)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for (num, name), (status, detail) in sorted(_results.items()):
        label = f"criterion {num:>2} {name.replace('_', ' ')}"
        terminalreporter.write_line(f"{status}  {label:<42} {detail}")
