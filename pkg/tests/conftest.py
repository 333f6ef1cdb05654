import pytest

_KEY = "acceptance_results"


def _results(config) -> list:
    if not hasattr(config, _KEY):
        setattr(config, _KEY, [])
    return getattr(config, _KEY)


@pytest.fixture(scope="session")
def acceptance_log(request):
    """Session-wide list of (criterion, title, passed, detail) rows shown in the terminal summary."""
    return _results(request.config)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    rows = getattr(config, _KEY, None)
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(rows, key=lambda r: r[0]):
        terminalreporter.write_line(f"AC{number:<3d} {'PASS' if passed else 'FAIL'}  {title}: {detail}")
    terminalreporter.write_line(f"{sum(1 for r in rows if r[2])}/{len(rows)} criteria passed")
