import sys
from collections import defaultdict
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

_criteria: dict[int, dict] = defaultdict(lambda: {"title": "", "outcomes": []})


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark:
            entry = _criteria[mark.args[0]]
            entry["title"] = mark.args[1]
            entry.setdefault("items", set()).add(item.nodeid)


def pytest_runtest_logreport(report):
    for entry in _criteria.values():
        if report.nodeid in entry.get("items", ()):
            if report.when == "call" or report.outcome != "passed":
                entry["outcomes"].append((report.nodeid, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        outcomes = entry["outcomes"]
        if not outcomes:
            status = "NOT RUN"
        elif all(o == "passed" for _, o in outcomes):
            status = "PASS"
        else:
            status = "FAIL"
        n_ok = sum(o == "passed" for _, o in outcomes)
        terminalreporter.write_line(f"criterion {number:2d}: {status:7s} {entry['title']} ({n_ok}/{len(outcomes)} checks)")
