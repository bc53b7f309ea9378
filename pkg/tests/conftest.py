import pytest
from mpmath import mp

from qpoly import DEFAULT_BUDGET


@pytest.fixture
def budget():
    return DEFAULT_BUDGET


def rel_err(a, b):
    """|a-b| / |b| in mpmath arithmetic at ambient precision."""
    with mp.workdps(60):
        a = mp.mpf(a)
        b = mp.mpf(b)
        if b == 0:
            return abs(a)
        return abs(a - b) / abs(b)
