import pytest

from focusfocus.series import q1_series, q2_series, q_series


@pytest.fixture
def q1():
    return q1_series(6)


@pytest.fixture
def q2():
    return q2_series(6)


@pytest.fixture
def q(request):
    return q_series(6)
