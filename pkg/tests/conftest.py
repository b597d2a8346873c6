import pytest

_LINES = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one pass/fail line per acceptance criterion.

    Returns ``check(number, passed, detail)`` which prints the line, keeps it
    for the terminal summary and asserts ``passed``.
    """
    lines = request.config.stash.setdefault(_LINES, [])

    def check(number, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'} criterion {number:>2}: {detail}"
        print(line)
        lines.append((number, line))
        assert passed, line

    return check


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
