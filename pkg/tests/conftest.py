import pytest

_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES] = []


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion."""
    lines = request.config.stash[_LINES]

    def record(number, title, ok, elapsed, limit, detail=""):
        in_time = elapsed < limit
        verdict = "PASS" if ok and in_time else "FAIL"
        line = f"[{verdict}] criterion {number}: {title} ({elapsed:.2f}s, limit {limit:g}s)"
        if detail:
            line += f" {detail}"
        if not in_time:
            line += " over time budget"
        lines.append(line)
        print(line)
        return ok and in_time

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
