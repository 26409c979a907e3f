"""Collects acceptance-criterion outcomes and prints one line per criterion."""

from collections import defaultdict

import pytest

CRITERIA = {
    1: "feasibility table reproduction",
    2: "LHV matches quantum with matched settings",
    3: "retarded CHSH bound (analytic and Monte Carlo)",
    4: "closed-form correlation oracles",
    5: "end-to-end Canary run",
    6: "replay and delay-injection controls",
    7: "significance scales as sqrt(T)",
    8: "determinism and substream independence",
}

_outcomes: dict[int, list[tuple[str, bool]]] = defaultdict(list)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _outcomes[mark.args[0]].append((item.name, rep.passed))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(CRITERIA):
        results = _outcomes.get(n)
        if not results:
            tr.write_line(f"criterion {n}: NOT RUN  {CRITERIA[n]}")
            continue
        failed = [name for name, ok in results if not ok]
        status = "PASS" if not failed else "FAIL"
        detail = f"  (failed: {', '.join(failed)})" if failed else ""
        tr.write_line(f"criterion {n}: {status}  {CRITERIA[n]}{detail}")
