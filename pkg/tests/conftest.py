import pytest

# filled by test_acceptance.py, printed once at the end of the run
ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


@pytest.fixture
def record_acceptance():
    def record(label: str, passed: bool, detail: str = ""):
        ACCEPTANCE_RESULTS.append((label, bool(passed), detail))
        print(f"{'PASS' if passed else 'FAIL'} {label} {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}  {detail}")
