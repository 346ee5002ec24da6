import pytest
from mpmath import mp

from lommel.numerics import DEFAULT_PRECISION, precision_scope


@pytest.fixture(autouse=True)
def default_precision():
    with precision_scope(DEFAULT_PRECISION):
        yield
    mp.prec = DEFAULT_PRECISION.working_bits
