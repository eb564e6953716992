"""Shared pytest plumbing: a per-criterion pass/fail log for the acceptance suite."""

import pytest

_ACCEPTANCE: dict = {}


@pytest.fixture(scope="session")
def acceptance_log():
    """Record ``(criterion, passed, detail)``; printed once per criterion at the end."""

    def record(criterion: int, passed: bool, detail: str) -> None:
        _ACCEPTANCE[criterion] = (bool(passed), detail)
        print(f"ACCEPTANCE {criterion:>2}: {'PASS' if passed else 'FAIL'} | {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for c in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[c]
        terminalreporter.write_line(f"criterion {c:>2}: {'PASS' if ok else 'FAIL'} | {detail}")
