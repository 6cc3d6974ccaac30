import pytest

from svclab import groups as gr

ACCEPTANCE_LINES: dict[int, str] = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} ({detail})"
    ACCEPTANCE_LINES[criterion] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])


@pytest.fixture(scope="session")
def d3xd5():
    return gr.direct_product(gr.dihedral(3), gr.dihedral(5), labels=["3", "5"], name="D3xD5")


@pytest.fixture(scope="session")
def diag15(d3xd5):
    return gr.diagonal_subgroup(d3xd5, ["3", "5"])


@pytest.fixture(scope="session")
def d4():
    return gr.dihedral(4)


@pytest.fixture(scope="session")
def a4():
    return gr.alternating(4)


def involutions_and_one(G):
    return [x for x in range(G.order) if G.op(x, x) == 0]
