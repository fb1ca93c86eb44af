import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def record_criterion():
    """Record one summary line per acceptance criterion, printed at the end of the run."""
    def record(number: int, title: str, ok: bool, detail: str = "") -> None:
        status = "PASS" if ok else "FAIL"
        ACCEPTANCE_LINES.append((number, f"criterion {number:2d} {status}  {title}  {detail}".rstrip()))
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
