import pytest
from hypothesis import HealthCheck, settings

from melikyan.finite_field import make_field
from melikyan.melikyan import melikyan_shape, structure_table

settings.register_profile(
    "repo", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile("repo")


@pytest.fixture(scope="session")
def F5():
    return make_field(5, 1)


@pytest.fixture(scope="session")
def F25():
    return make_field(5, 2)


@pytest.fixture(scope="session")
def S11():
    return melikyan_shape(1, 1)


@pytest.fixture(scope="session")
def S21():
    return melikyan_shape(2, 1)


@pytest.fixture(scope="session")
def T11(S11):
    return structure_table(S11)


@pytest.fixture(scope="session")
def T21(S21):
    return structure_table(S21)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
