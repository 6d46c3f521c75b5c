import os

import pytest

from firesim.params import default_parameters

FULL = os.environ.get("FIRESIM_FULL", "") not in ("", "0", "false")

_criteria: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def params():
    return default_parameters()


@pytest.fixture
def record_criterion():
    """Store the outcome of an acceptance criterion for the end-of-run summary."""

    def record(number: int, passed: bool, detail: str):
        _criteria[number] = (bool(passed), detail)
        print(f"CRITERION {number}: {'PASS' if passed else 'FAIL'} - {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        passed, detail = _criteria[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
