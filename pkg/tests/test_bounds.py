import mpmath
import pytest
from mpmath import mpc, mpf

from lommel import bounds, oracle
from lommel.coefficients import lommel_coeff
from lommel.errors import DegenerateBoundError, HypothesisViolation, ParameterError
from lommel.expansion import euler_terms, hyper_terms, remainder_prefactor
from lommel.numerics import Precision, branch_power, precision_scope

PI = mpmath.pi
Q, T = mpf(1) / 4, mpf(1) / 3
SLACK = 1 + mpf(10) ** -6


def first_omitted(mu, nu, z, N):
    return branch_power(abs(z), mpmath.arg(z), mu - 1) * (-1) ** N * lommel_coeff(N, -mu, nu) / z ** (2 * N)


def test_ell_values():
    assert bounds.ell(0) == 1
    assert bounds.ell(PI / 8) == 1
    assert abs(bounds.ell(3 * PI / 8) - mpmath.sqrt(2)) < mpf(10) ** -70
    assert bounds.ell(-3 * PI / 8) == bounds.ell(3 * PI / 8)
    with pytest.raises(ParameterError):
        bounds.ell(PI / 2)


def test_ell_hat_values():
    assert bounds.ell_hat(0) == 2
    assert abs(bounds.ell_hat(PI / 4) - mpmath.sqrt(2)) < mpf(10) ** -70
    assert abs(bounds.ell_hat(3 * PI / 8) - 1 / mpmath.sin(3 * PI / 8)) < mpf(10) ** -70
    eps = mpf(10) ** -30
    assert abs(bounds.ell_hat(PI / 4 + eps) - bounds.ell_hat(PI / 4 - eps)) < mpf(10) ** -25


def test_gamma_ratio_factor():
    assert bounds.gamma_ratio_factor(Q, T) == (1, False)
    value, limiting = bounds.gamma_ratio_factor(mpc(0, 1), 0)
    assert abs(value - (mpmath.cosh(PI) + 1) / 2) < mpf(10) ** -70
    assert not limiting


def test_gamma_ratio_dominates_exact_ratio():
    # the cosine form majorizes |Gamma(Re a) Gamma(Re b) / (Gamma(a) Gamma(b))|
    for mu, nu in [(mpc(0.5, 0.25), mpc(1, 0.5)), (mpc(0.1, -1), mpc(0.3, 0.7)), (mpc(-0.6, 0.4), mpc(1.3, -0.2))]:
        a, b = (nu - mu + 1) / 2, (1 - mu - nu) / 2
        exact = abs(mpmath.gamma(a.real) * mpmath.gamma(b.real) / (mpmath.gamma(a) * mpmath.gamma(b)))
        assert bounds.gamma_ratio_factor(mu, nu)[0] >= exact * (1 - mpf(10) ** -60)


def test_right_half_real_equals_first_omitted_term():
    z, N = mpf(10), 5
    rep = bounds.bound_right_half(Q, T, z, N)
    assert abs(rep.bound - abs(first_omitted(Q, T, z, N))) < mpf(10) ** -70 * rep.bound
    rotated = bounds.bound_right_half(Q, T, z * mpmath.expj(3 * PI / 8), N)
    assert abs(rotated.bound / rep.bound - mpmath.sqrt(2)) < mpf(10) ** -60


def test_right_half_sound_against_oracle():
    z, N = mpf(10), 5
    rem = oracle.remainder_reference(Q, T, z, N).value
    assert abs(rem) <= bounds.bound_right_half(Q, T, z, N).bound * SLACK


@pytest.mark.parametrize("mu,nu", [(Q, T), (mpf(0), mpf(1) / 2), (mpf(-1) / 2, mpf(0))])
@pytest.mark.parametrize("z", [mpf(5), mpf(10), mpf(20)])
def test_mean_value_ratio_in_unit_interval(mu, nu, z):
    for N in range(2, 12):
        ratio = oracle.remainder_reference(mu, nu, z, N).value / first_omitted(mu, nu, z, N)
        assert abs(ratio.imag) < mpf(10) ** -60
        assert 0 < ratio.real < 1


def test_meijer_phi_closed_form_at_stokes_line():
    for N in (3, 5, 10):
        assert abs(bounds.meijer_phi(N, Q, PI / 2) - mpmath.atan(1 / mpmath.sqrt(2 * N + 2 - Q))) < mpf(10) ** -60


def test_meijer_phi_minimizes_factor():
    N, theta = 5, 2 * PI / 3
    phi = bounds.meijer_phi(N, mpf(0), theta)

    def factor(p):
        return 1 / (mpmath.sin(2 * (theta - p)) * mpmath.cos(p) ** (2 * N + 1))

    lo, hi = theta - PI / 2, theta - PI / 4
    grid = [lo + (hi - lo) * k / 4000 for k in range(1, 4000)]
    best = min(factor(p) for p in grid)
    assert factor(phi) <= best * (1 + mpf(10) ** -8)
    assert lo < phi < hi


def test_meijer_phi_decays_with_N():
    values = [bounds.meijer_phi(N, 0, PI / 2) for N in (10, 40, 160)]
    assert values[0] / values[1] == pytest.approx(2, rel=0.05)
    assert values[1] / values[2] == pytest.approx(2, rel=0.02)


def test_rotated_bound_near_stokes_simplification():
    N = 6
    rep = bounds.bound_rotated(Q, T, 12 * mpmath.expj(PI / 2), N)
    assert rep.sector_factor <= mpmath.sqrt(mpmath.e * (2 * N + mpf(5) / 2 - Q)) / 2 * (1 + mpf(10) ** -60)


def test_rotated_bound_sound_past_stokes_line():
    z, N = 12 * mpmath.expj(mpf("0.6") * PI), 4
    rep = bounds.bound_rotated(0, T, z, N)
    assert rep.phi is not None
    rem = oracle.remainder_reference(0, T, z, N).value
    assert abs(rem) <= rep.bound * SLACK


def test_rotated_bound_conjugation():
    z, N = 12 * mpmath.expj(mpf("0.4") * PI), 5
    mu, nu = mpc(0.25, 0.2), mpc(0.3, -0.1)
    a = bounds.bound_rotated(mu, nu, z, N).bound
    b = bounds.bound_rotated(mpmath.conj(mu), mpmath.conj(nu), mpmath.conj(z), N).bound
    assert abs(a - b) < mpf(10) ** -70 * a


def test_validity_violation_names_inequality():
    with pytest.raises(HypothesisViolation) as info:
        bounds.bound_right_half(mpf(5), T, 10, 2)
    assert info.value.inequality == "Re mu + |Re nu| < 2N + 1"


def test_hyper_bound_sound():
    z, N, M = mpf(15), 8, 3
    r_n = oracle.remainder_reference(Q, T, z, N).value
    r_nm = r_n / remainder_prefactor(Q, T) - hyper_terms(Q, T, z, N, M)
    rep = bounds.hyper_bound(Q, T, z, N, M)
    assert abs(r_nm) <= rep.bound * SLACK
    assert rep.regime == "hyper_reexpansion"


def test_hyper_remainder_matches_kernel_quadrature():
    with precision_scope(Precision(128, 192)):
        z, N, M = mpf(15), 8, 3
        r_nm = oracle.remainder_reference(Q, T, z, N).value / remainder_prefactor(Q, T) - hyper_terms(Q, T, z, N, M)
        quad = oracle.kernel_remainder_M(Q, T, z, N, M).value
        assert abs(quad - r_nm) <= abs(r_nm) * mpf(10) ** -25


def test_hyper_bound_degenerate_and_limiting():
    with pytest.raises(DegenerateBoundError):
        bounds.hyper_bound(Q, mpf(1) / 2, 15, 8, 1)
    rep = bounds.hyper_bound(Q, mpc(0.5, 0.5), 15, 8, 2)
    assert rep.limiting and mpmath.isfinite(rep.bound) and rep.bound > 0
    with pytest.raises(HypothesisViolation):
        bounds.hyper_bound(Q, T, mpc(0, -15) * mpmath.expj(-0.1), 8, 3)


def test_even_M_bound_real_is_twice_first_group():
    z, N, M = mpf(12), 6, 2
    rep = bounds.even_M_euler_bound(Q, T, z, N, M)
    v_M = euler_terms(Q, T, z, N, M + 1)[M]
    assert abs(rep.bound - 2 * abs(branch_power(z, 0, Q - 1) * v_M)) < mpf(10) ** -70 * rep.bound
    tilted = bounds.even_M_euler_bound(Q, T, z * mpmath.expj(PI / 4), N, M)
    assert tilted.sector_factor == pytest.approx(float(mpmath.sqrt(2)))


def test_even_M_bound_sound():
    z, N, M = mpf(12), 6, 2
    rem = oracle.remainder_reference(Q, T, z, N).value - branch_power(z, 0, Q - 1) * sum(euler_terms(Q, T, z, N, M))
    assert abs(rem) <= bounds.even_M_euler_bound(Q, T, z, N, M).bound * SLACK


def test_even_M_rejects_odd():
    with pytest.raises(HypothesisViolation):
        bounds.even_M_euler_bound(Q, T, 12, 6, 3)
