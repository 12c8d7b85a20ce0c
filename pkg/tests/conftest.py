import pytest

ACCEPTANCE = {}


@pytest.fixture
def record():
    """Store ``(passed, detail)`` for an acceptance criterion."""

    def _record(number, name, passed, detail):
        ACCEPTANCE[number] = (name, bool(passed), detail)
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        name, passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number} [{name}]: {'PASS' if passed else 'FAIL'} ({detail})")
