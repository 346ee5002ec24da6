import mpmath
import pytest
from mpmath import mpc, mpf

from lommel.errors import HypothesisViolation, ParameterError
from lommel.terminant import stokes_c, terminant, terminant_erf_approx

PI = mpmath.pi


def reference(p, w):
    """Principal-branch terminant straight from mpmath's incomplete gamma."""
    p, w = mpc(p), mpc(w)
    return mpmath.expj(PI * p) * mpmath.gamma(p) * mpmath.gammainc(1 - p, w) / (2j * PI)


CASES = [
    (mpf(35) / 4, mpc(0, 15)),
    (mpc(3.5, 0.2), mpc(4, -2)),
    (mpc(12.25, -0.3), mpc(-9, 8)),
    (mpf("0.75"), mpc(30, 1)),
    (mpc(20.5, 0), mpc(0, -21)),
]


@pytest.mark.parametrize("p,w", CASES)
@pytest.mark.parametrize("method", ["series", "cf", "integral", "auto"])
def test_methods_agree_with_mpmath(p, w, method):
    if method == "cf" and abs(w) < 10:
        pytest.skip("continued fraction converges slowly for small |w|")
    if method == "integral" and not mpc(p).real > 0:
        pytest.skip("integral route needs Re p > 0")
    ref = reference(p, w)
    got = terminant(p, w, method=method).value
    assert abs(got - ref) <= abs(ref) * mpf(10) ** -60


@pytest.mark.parametrize("n", [1, 2, 5, 9])
def test_integer_order(n):
    w = mpc(6, 3)
    ref = reference(n, w)
    assert abs(terminant(n, w, method="series").value - ref) <= abs(ref) * mpf(10) ** -65


@pytest.mark.parametrize("p", [mpf("7.3"), mpc(4.5, 0.7), mpf(6)])
def test_branch_connection(p):
    # T_p(w e^{2 pi i}) = e^{-2 pi i p} T_p(w) + 1, checked between two independent routes
    w = mpc(8, 5)
    theta = mpmath.arg(w)
    lifted = terminant(p, w, arg_w=theta + 2 * PI, method="series").value
    via_connection = mpmath.expj(-2 * PI * p) * terminant(p, w, method="cf").value + 1
    assert abs(lifted - via_connection) <= mpf(10) ** -60 * max(1, abs(lifted))


def test_series_on_far_branches_matches_cf_mapping():
    p, w = mpf("11.5"), mpc(10, 0)
    for k in (-2, -1, 1, 2):
        a = terminant(p, w, arg_w=2 * PI * k, method="series").value
        b = terminant(p, w, arg_w=2 * PI * k, method="cf").value
        assert abs(a - b) <= mpf(10) ** -60 * max(1, abs(a))


def test_half_on_stokes_line():
    # T_p(w) -> 1/2 at arg w = pi when p ~ |w|
    r = mpf(200)
    t = terminant(r + 1, r, arg_w=PI).value
    assert abs(t.real - mpf(1) / 2) < mpf("0.02")


def test_stokes_c_properties():
    assert stokes_c(PI) == 0
    for phi in (PI - mpf("0.3"), PI + mpf("0.2"), mpf("2.5") * PI):
        c = stokes_c(phi)
        lhs = c * c / 2
        rhs = 1 + 1j * (phi - PI) - mpmath.expj(phi - PI)
        assert abs(lhs - rhs) < mpf(10) ** -70
    # c ~ phi - pi near the Stokes line
    small = mpf(10) ** -20
    assert abs(stokes_c(PI + small) / small - 1) < mpf(10) ** -15
    with pytest.raises(ParameterError):
        stokes_c(-PI)


def test_erf_model_tracks_terminant():
    r = mpf(100)
    p = r + mpf("0.5")
    for phi in (PI - mpf("0.2"), PI, PI + mpf("0.15")):
        t = terminant(p, r * mpmath.expj(phi), arg_w=phi).value
        model = terminant_erf_approx(p, r * mpmath.expj(phi), arg_w=phi)
        assert abs(t - model) < mpf("0.05")
    assert abs(terminant_erf_approx(p, -r, arg_w=PI) - mpf(1) / 2) < mpf(10) ** -60


def test_erf_model_lower_side_normalization():
    r = mpf(80)
    p = r + mpf("0.5")
    phi = -PI + mpf("0.1")
    w = r * mpmath.expj(phi)
    exact = terminant(p, w, arg_w=phi).value
    lower = terminant_erf_approx(p, w, arg_w=phi, side="lower")
    assert abs(exact - lower) < mpf("0.05") * max(1, abs(exact))


def test_argument_checks():
    with pytest.raises(ParameterError):
        terminant(1.5, 0)
    with pytest.raises(ParameterError):
        terminant(1.5, 2, method="magic")
    with pytest.raises(HypothesisViolation):
        terminant(-1.5, 2, method="integral")
    with pytest.raises(ParameterError):
        terminant_erf_approx(2.5, 3, side="middle")
