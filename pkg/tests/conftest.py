import pytest
from hypothesis import settings

# numba compiles on first call, so per-example deadlines are meaningless; runs are seeded
settings.register_profile("lshape", deadline=None, derandomize=True, print_blob=True)
settings.load_profile("lshape")

_LINES: list[str] = []


@pytest.fixture
def report_line():
    """Collect one summary line per acceptance criterion; printed at the end of the run."""
    def add(line: str) -> None:
        print(line)
        _LINES.append(line)
    return add


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for ln in _LINES:
            terminalreporter.write_line(ln)
