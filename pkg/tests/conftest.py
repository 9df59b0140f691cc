"""Shared test plumbing: a recorder that prints one line per acceptance
criterion in the terminal summary, pass or fail."""
import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    def record(criterion: str, ok: bool, detail: str) -> bool:
        status = "PASS" if ok else "FAIL"
        ACCEPTANCE_LINES.append(f"{status}  {criterion}: {detail}")
        return ok
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
