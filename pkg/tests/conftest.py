import pytest

_acceptance_lines: list[str] = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line per acceptance criterion; shown in the
    terminal summary regardless of capture settings."""

    def _report(num: int, label: str, ok: bool):
        line = f"[criterion {num:2d}] {'PASS' if ok else 'FAIL'}: {label}"
        _acceptance_lines.append(line)
        assert ok, line

    return _report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
