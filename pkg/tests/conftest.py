import pytest

_VERDICTS = pytest.StashKey()


@pytest.fixture
def criterion(request):
    """Record a one-line verdict for an acceptance criterion; returns a callable ``(number, ok, detail)``."""
    verdicts = request.config.stash.setdefault(_VERDICTS, {})

    def record(number, ok, detail):
        verdicts[number] = (bool(ok), detail)
        print(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    verdicts = config.stash.get(_VERDICTS, {})
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(verdicts):
        ok, detail = verdicts[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
