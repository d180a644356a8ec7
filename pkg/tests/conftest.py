import functools

import pytest

from ergorisk import casebook
from ergorisk.riskengine import QuadratureSettings

_acceptance = {}


@pytest.fixture(scope="session")
def q():
    return QuadratureSettings()


@functools.lru_cache(maxsize=None)
def calibrated(case_id, strategy="two_rate"):
    return casebook.calibrate_case(casebook.get_case(case_id), strategy)


@functools.lru_cache(maxsize=None)
def reproduced(case_id, strategy="two_rate"):
    case = casebook.get_case(case_id)
    return {r.t_D: r for r in casebook.reproduce(case, (1, 50, 100), strategy, hazard=calibrated(case_id, strategy))}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    crit = name.split("[")[0]
    prev = _acceptance.get(crit, (True, []))
    ok = prev[0] and report.outcome == "passed"
    notes = prev[1] + ([name] if report.outcome != "passed" else [])
    _acceptance[crit] = (ok, notes)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_acceptance):
        ok, failed = _acceptance[crit]
        line = f"{'PASS' if ok else 'FAIL'}  {crit}"
        if failed:
            line += "  (failing: " + ", ".join(f.split("[")[-1].rstrip("]") if "[" in f else f for f in failed) + ")"
        terminalreporter.write_line(line)
