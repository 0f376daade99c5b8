import pytest

from sl2graphs import _kernels

BACKENDS = ["numpy"] + (["cython"] if _kernels.compiled is not None else [])

# acceptance criterion number -> printed verdict line
ACCEPTANCE_LINES = {}


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def verdict():
    """Record and print one PASS/FAIL line for an acceptance criterion, then
    assert it."""
    def report(number, ok, detail):
        line = f"[criterion {number:2d}] {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES[number] = line
        print(line)
        assert ok, line
    return report


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
