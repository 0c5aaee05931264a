import pytest

from mvoptbl.families import build_family

# Lines collected by test_acceptance.py and printed after the run.
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])


def small_grid():
    """A cross-section of Pearson instances, cheap enough for unit tests."""
    out = []
    for N in (1, 2, 3):
        for s in (1, 2, 3):
            out.append(build_family("hermite", N, 1.0, s))
            out.append(build_family("laguerre", N, 0.5, s))
        out.append(build_family("charlier", N, 1, a=1.0))
    out.append(build_family("gegenbauer", 1, 1.0))
    out.append(build_family("gegenbauer", 3, 0.5))
    return out


def grid_id(f):
    return f"{f.kind}-{f.set_id}-N{f.N}-nu{f.nu}"


@pytest.fixture(params=small_grid(), ids=grid_id)
def pearson_family(request):
    return request.param
