import re

import pytest

_DETAILS = {}
_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)")


@pytest.fixture
def record(request):
    """Attach a one-line measurement to an acceptance test for the summary."""
    def _record(ok, text):
        _DETAILS[request.node.nodeid] = text
        m = _CRITERION.search(request.node.nodeid)
        print(f"[{'PASS' if ok else 'FAIL'}] criterion {m.group(1) if m else '?'}: {text}")
    return _record


def pytest_terminal_summary(terminalreporter):
    rows = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            m = _CRITERION.search(getattr(rep, "nodeid", ""))
            if not m or (rep.when != "call" and outcome != "error"):
                continue
            rows[int(m.group(1))] = ("PASS" if outcome == "passed" else "FAIL",
                                     _DETAILS.get(rep.nodeid, ""))
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(rows):
        status, detail = rows[k]
        terminalreporter.write_line(f"criterion {k}: {status}  {detail}".rstrip())
