import pytest

from polarforge import pipelines
from polarforge.gf import field
from polarforge.ovoids import find_m_ovoid
from polarforge.polarspace import build

ACCEPTANCE = {}


def record(number, title, ok, detail=""):
    ACCEPTANCE[number] = (title, ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[number]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d} {status}: {title}" + (f" ({detail})" if detail else ""))


@pytest.fixture(scope="session")
def F3():
    return field(3)


@pytest.fixture(scope="session")
def qm53():
    return build("Q-:5:3")


@pytest.fixture(scope="session")
def qp73():
    return pipelines.hyperbolic_space(3)


@pytest.fixture(scope="session")
def two_ovoid(qm53):
    return find_m_ovoid(qm53, 2, seed=0)


@pytest.fixture(scope="session")
def glue_report():
    return pipelines.glue_construct(3, seed=0)


@pytest.fixture(scope="session")
def family():
    return pipelines.five_disjoint_2ovoids(seed=0)
