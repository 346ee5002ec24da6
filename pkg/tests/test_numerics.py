import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpc, mpf

from lommel.errors import ParameterError
from lommel.numerics import (
    Precision,
    branch_power,
    complex_gamma,
    current_precision,
    near_integer,
    oracle_scope,
    parse_complex,
    parse_real,
    precision_scope,
    rgamma,
)


def test_precision_validation():
    with pytest.raises(ParameterError):
        Precision(256, 300)
    with pytest.raises(ParameterError):
        Precision.from_digits(29)
    with pytest.raises(ParameterError):
        Precision.from_digits(201)
    p = Precision.from_digits(50)
    assert p.working_digits >= 50
    assert p.oracle_bits == p.working_bits + 128


def test_precision_scope_restores():
    before = mp.prec
    with precision_scope(Precision(128, 256)):
        assert mp.prec == 128
        assert current_precision().oracle_bits == 256
        with oracle_scope(10):
            assert mp.prec == 266
        assert mp.prec == 128
    assert mp.prec == before


@pytest.mark.parametrize(
    "text,expected",
    [
        ("1/4", mpc(0.25, 0)),
        ("2", mpc(2, 0)),
        ("0.5+0.25i", mpc(0.5, 0.25)),
        ("1-i", mpc(1, -1)),
        ("3i", mpc(0, 3)),
        ("1e-3-2e+1i", mpc("1e-3", -20)),
    ],
)
def test_parse_complex(text, expected):
    assert parse_complex(text) == expected


def test_parse_rejects_garbage():
    with pytest.raises(ParameterError):
        parse_real("abc")
    with pytest.raises(ParameterError):
        parse_complex("")


def test_near_integer():
    assert near_integer(mpf(3)) == 3
    assert near_integer(mpf(3) + mpf(2) ** -250) == 3
    assert near_integer(mpf("3.001")) is None


def test_branch_power_tracks_winding():
    # the same point on different sheets differs by e^{2 pi i w}
    w = mpc(0.25, 0.1)
    a = branch_power(2, mpf(1), w)
    b = branch_power(2, mpf(1) + 2 * mpmath.pi, w)
    assert abs(b / a - mpmath.expj(2 * mpmath.pi * w)) < mpf(10) ** -70


@pytest.mark.parametrize("w", [mpc(0.3, 0), mpc(-2.5, 0), mpc(7.25, 3), mpc(-4.2, -1.7), mpc(0.5, 40), mpc(60, -2)])
def test_complex_gamma_matches_mpmath(w):
    ref = mpmath.gamma(w)
    assert abs(complex_gamma(w) - ref) <= abs(ref) * mpf(10) ** -70


@settings(max_examples=40, deadline=None)
@given(st.floats(-30, 30), st.floats(-30, 30))
def test_complex_gamma_property(x, y):
    w = mpc(x, y)
    if y == 0 and x <= 0 and x == int(x):
        return
    ref = mpmath.gamma(w)
    assert abs(complex_gamma(w) - ref) <= abs(ref) * mpf(10) ** -65


def test_rgamma_zero_at_poles():
    assert rgamma(-3) == 0
    assert rgamma(0) == 0
    assert abs(rgamma(mpf(1) / 2) - 1 / mpmath.sqrt(mpmath.pi)) < mpf(10) ** -70
