import pytest

from padicperiods.padic import make_field_cached


@pytest.fixture(scope="session")
def Q2():
    return make_field_cached(2, 1, 16)


@pytest.fixture(scope="session")
def Q4():
    """Degree-2 unramified extension of Q_2 at precision 16."""
    return make_field_cached(2, 2, 16)


@pytest.fixture(scope="session")
def Q9():
    return make_field_cached(3, 2, 8)
