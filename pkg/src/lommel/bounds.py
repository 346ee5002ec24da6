"""Rigorous bounds for the remainders of the Lommel expansion.

All coefficient-times-Gamma-ratio products go through
:func:`scaled_coefficients`, which evaluates them in a Pochhammer-collapsed
closed form.  That form is finite and continuous where the separate
factors have a pole and a zero, so the limiting cases need no numerical
extrapolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
from mpmath import mp, mpc, mpf

from .coefficients import lommel_coeff
from .errors import DegenerateBoundError, HypothesisViolation, ParameterError
from .numerics import Number, complex_gamma, near_integer, real_gamma, rgamma, to_mpc, to_mpf
from .terminant import terminant


@dataclass(frozen=True)
class BoundReport:
    """A certified bound and how it was obtained.

    ``regime`` names the bound family; ``limiting`` is set when the Gamma
    ratio had to be read as a limit; ``phi`` is the rotation angle of the
    rotated-path bound.
    """

    bound: mpf
    regime: str
    limiting: bool = False
    phi: mpf | None = None
    sector_factor: mpf | None = None


# -- sector factors -----------------------------------------------------------


def ell(theta: Number) -> mpf:
    """``|csc 2 theta|`` for ``pi/4 < |theta| < pi/2``, else 1."""
    t = abs(to_mpf(theta))
    if mpmath.pi / 4 < t < mpmath.pi / 2:
        return abs(1 / mpmath.sin(2 * t))
    if t >= mpmath.pi / 2:
        raise ParameterError("sector factor needs |theta| < pi/2")
    return mpf(1)


def ell_hat(theta: Number) -> mpf:
    """``|csc theta|`` for ``pi/4 < |theta| < pi/2``, else ``2 |cos theta|``."""
    t = abs(to_mpf(theta))
    if mpmath.pi / 4 < t < mpmath.pi / 2:
        return abs(1 / mpmath.sin(t))
    if t >= mpmath.pi / 2:
        raise ParameterError("sector factor needs |theta| < pi/2")
    return 2 * abs(mpmath.cos(t))


# -- Gamma ratios ------------------------------------------------------------


def _positive_integer(x: mpf) -> bool:
    n = near_integer(x)
    return n is not None and n >= 1


def _nonpositive_integer(x: mpf) -> bool:
    n = near_integer(x)
    return n is not None and n <= 0


def _half_args(mu: mpc, nu: mpc) -> tuple[mpc, mpc]:
    return (nu - mu + 1) / 2, (1 - mu - nu) / 2


def cosine_form_available(mu: Number, nu: Number) -> bool:
    """Whether the cosine simplification of the Gamma ratio is a valid upper bound.

    It bounds the ratio when neither ``1 - Re a`` nor ``1 - Re b`` is a
    non-positive integer, where ``a = (nu - mu + 1)/2`` and
    ``b = (1 - mu - nu)/2``.
    """
    a, b = _half_args(to_mpc(mu), to_mpc(nu))
    return not (_positive_integer(a.real) or _positive_integer(b.real))


def gamma_ratio_factor(mu: Number, nu: Number) -> tuple[mpf, bool]:
    """Factor ``|Gamma(Re a) Gamma(Re b) / (Gamma(a) Gamma(b))|`` or its cosine majorant.

    Returns ``(value, limiting)``.  The cosine form
    ``|cos(pi mu) + cos(pi nu)| / |cos(pi Re mu) + cos(pi Re nu)|`` is used when
    available.  When the factor alone is infinite (its finite limit only
    exists multiplied by the vanishing coefficient) this raises
    :class:`DegenerateBoundError`; use :func:`scaled_coefficients` instead.
    """
    mu, nu = to_mpc(mu), to_mpc(nu)
    if mu.imag == 0 and nu.imag == 0:
        return mpf(1), False
    a, b = _half_args(mu, nu)
    if cosine_form_available(mu, nu):
        num = abs(mpmath.cospi(mu) + mpmath.cospi(nu))
        den = abs(mpmath.cospi(mu.real) + mpmath.cospi(nu.real))
    else:
        num = abs(real_gamma(a.real) * real_gamma(b.real)) if not (_nonpositive_integer(a.real) or _nonpositive_integer(b.real)) else mpmath.inf
        den = abs(complex_gamma(a) * complex_gamma(b))
    if den == 0 or num == mpmath.inf:
        raise DegenerateBoundError("Gamma ratio is only finite together with the vanishing coefficient")
    return num / den, False


def scaled_coefficients(ns: list[int], mu: Number, nu: Number) -> tuple[list[mpf], str, bool]:
    """Products ``F * a_n(-Re mu, Re nu)`` for each ``n`` in ``ns``, up to a common sign.

    ``F`` is the Gamma ratio (or its cosine majorant).  With
    ``x = Re a``, ``y = Re b`` the products are

    * ratio form: ``4^n Gamma(x + n) Gamma(y + n) / |Gamma(a) Gamma(b)|``;
    * cosine form: ``|sin(pi a) sin(pi b)| 4^n Gamma(x + n) Gamma(1 - x) Gamma(y + n) Gamma(1 - y) / pi^2``,

    both finite where ``Gamma(x)`` or ``Gamma(y)`` has a pole.  Requires
    ``x + n > 0`` and ``y + n > 0``.  Returns ``(values, form, limiting)``.
    """
    mu, nu = to_mpc(mu), to_mpc(nu)
    if mu.imag == 0 and nu.imag == 0:
        vals = [lommel_coeff(n, -mu.real, nu.real) for n in ns]
        return [mpf(v) for v in vals], "cosine", False
    a, b = _half_args(mu, nu)
    x, y = a.real, b.real
    for n in ns:
        if not (x + n > 0 and y + n > 0):
            raise HypothesisViolation("Re mu + |Re nu| < 2N + 1")
    limiting = _nonpositive_integer(x) or _nonpositive_integer(y)
    if cosine_form_available(mu, nu):
        common = abs(mpmath.sinpi(a) * mpmath.sinpi(b)) * real_gamma(1 - x) * real_gamma(1 - y) / mpmath.pi**2
        form = "cosine"
    else:
        common = abs(rgamma(a) * rgamma(b))
        form = "ratio"
    common = abs(common)
    vals = [common * mpf(4) ** n * real_gamma(x + n) * real_gamma(y + n) for n in ns]
    return vals, form, limiting


def _regime(form: str) -> str:
    return "right_half_cosine" if form == "cosine" else "right_half_gamma_ratio"


def _polar(z: Number, arg: Number | None) -> tuple[mpf, mpf]:
    z = to_mpc(z)
    if z == 0:
        raise ParameterError("z must be non-zero")
    return abs(z), (mpmath.arg(z) if arg is None else to_mpf(arg))


def _abs_power(r: mpf, theta: mpf, w: mpc) -> mpf:
    # |z^w| on the branch arg z = theta
    return mpmath.exp(w.real * mpmath.log(r) - w.imag * theta)


def _check_validity(mu: mpc, nu: mpc, N: int) -> None:
    if N < 0:
        raise ParameterError("N must be non-negative")
    if not mu.real + abs(nu.real) < 2 * N + 1:
        raise HypothesisViolation("Re mu + |Re nu| < 2N + 1")


# -- right half-plane -----------------------------------------------------------


def bound_right_half(mu: Number, nu: Number, z: Number, N: int) -> BoundReport:
    """Bound on ``|R_N|`` for ``|arg z| < pi/2``.

    ``F |z^{mu-1}| |a_N(-Re mu, Re nu)| |z|^{-2N} ell(theta)``.
    """
    mu, nu = to_mpc(mu), to_mpc(nu)
    r, theta = _polar(z, None)
    if not abs(theta) < mpmath.pi / 2:
        raise HypothesisViolation("|arg z| < pi/2")
    _check_validity(mu, nu, N)
    (coeff,), form, limiting = scaled_coefficients([N], mu, nu)
    factor = ell(theta)
    bound = abs(coeff) * _abs_power(r, theta, mu - 1) / r ** (2 * N) * factor
    return BoundReport(bound, _regime(form), limiting, None, factor)


# -- rotated path -----------------------------------------------------------------


def _phi_equation(N: int, mu_re: mpf, theta: mpf):
    big = 2 * N + 3 - mu_re
    small = 2 * N - 1 - mu_re

    def h(phi: mpf) -> mpf:
        return big * mpmath.cos(3 * phi - 2 * theta) - small * mpmath.cos(phi - 2 * theta)

    def dh(phi: mpf) -> mpf:
        return -3 * big * mpmath.sin(3 * phi - 2 * theta) + small * mpmath.sin(phi - 2 * theta)

    return h, dh


def meijer_phi(N: int, mu_re: Number, theta: Number) -> mpf:
    """Rotation angle minimizing the rotated-path bound.

    Root of ``(2N + 3 - Re mu) cos(3 phi - 2 theta) = (2N - 1 - Re mu) cos(phi - 2 theta)``
    in the bracket belonging to ``theta`` in ``(pi/4, pi)``.  Bisection,
    then Newton polish.
    """
    mu_re, theta = to_mpf(mu_re), to_mpf(theta)
    pi = mpmath.pi
    if not 2 * N - 1 - mu_re > 0:
        raise HypothesisViolation("2N - 1 - Re mu > 0")
    if 3 * pi / 4 <= theta < pi:
        lo, hi = theta - pi / 2, pi / 2
    elif pi / 2 <= theta < 3 * pi / 4:
        lo, hi = theta - pi / 2, theta - pi / 4
    elif pi / 4 < theta < pi / 2:
        lo, hi = mpf(0), theta - pi / 4
    else:
        raise HypothesisViolation("pi/4 < theta < pi")
    h, dh = _phi_equation(N, mu_re, theta)
    hlo, hhi = h(lo), h(hi)
    if hlo == 0:
        return lo
    if hhi == 0:
        return hi
    if hlo * hhi > 0:
        raise ParameterError("no sign change of the angle equation in its bracket")
    for _ in range(60):
        mid = (lo + hi) / 2
        hm = h(mid)
        if (hm > 0) == (hlo > 0):
            lo, hlo = mid, hm
        else:
            hi = mid
    phi = (lo + hi) / 2
    for _ in range(50):
        step = h(phi) / dh(phi)
        phi -= step
        if abs(step) < mpf(2) ** (-mp.prec + 8):
            break
    return phi


def _rotated_factor(N: int, mu: mpc, theta: mpf, phi: mpf) -> mpf:
    return mpmath.exp(mu.imag * phi) / (mpmath.sin(2 * (theta - phi)) * mpmath.cos(phi) ** (2 * N + 1 - mu.real))


def bound_rotated(mu: Number, nu: Number, z: Number, N: int) -> BoundReport:
    """Bound on ``|R_N|`` from a rotated integration path, for ``pi/4 < |arg z| < pi``.

    The lower half-plane follows by conjugating ``z``, ``mu`` and ``nu``.
    Near the Stokes line (``|theta| <= pi/2``) the closed-form majorant
    ``sqrt(e (2N + 5/2 - Re mu)) / 2`` of the sector factor is also tried and
    the smaller bound is kept.
    """
    mu, nu = to_mpc(mu), to_mpc(nu)
    r, theta = _polar(z, None)
    if theta < 0:
        mu, nu, theta = mpmath.conj(mu), mpmath.conj(nu), -theta
    pi = mpmath.pi
    if not pi / 4 < theta < pi:
        raise HypothesisViolation("pi/4 < |arg z| < pi")
    _check_validity(mu, nu, N)
    phi = meijer_phi(N, mu.real, theta)
    if not (pi / 4 + phi < theta < pi / 2 + phi < pi):
        raise HypothesisViolation("pi/4 < pi/4 + phi < theta < pi/2 + phi < pi")
    factor = _rotated_factor(N, mu, theta, phi)
    regime = "rotated_path"
    if theta <= pi / 2:
        phi_s = mpmath.atan(1 / mpmath.sqrt(2 * N + 2 - mu.real))
        if pi / 4 + phi_s < theta:
            simple = mpmath.exp(mu.imag * phi_s) * mpmath.sqrt(mpmath.e * (2 * N + mpf(5) / 2 - mu.real)) / 2
            if simple < factor:
                factor, phi, regime = simple, phi_s, "rotated_near_stokes"
    (coeff,), _form, limiting = scaled_coefficients([N], mu, nu)
    bound = factor * abs(coeff) * _abs_power(r, theta, mu - 1) / r ** (2 * N)
    return BoundReport(bound, regime, limiting, phi, factor)


# -- re-expansion remainder ---------------------------------------------------------


def besselk_coeff_factor(nu: Number, M: int) -> tuple[mpf, bool]:
    """``|cos(pi nu)| |a_M(Re nu)| / |cos(pi Re nu)|`` in its finite closed form.

    Equal to ``|cos(pi nu)| Gamma(1/2 + x + M) Gamma(1/2 - x + M) / (pi 2^M M!)``
    with ``x = Re nu``; needs ``|x| < M + 1/2``.
    """
    nu = to_mpc(nu)
    x = nu.real
    if not abs(x) < M + mpf(1) / 2:
        raise HypothesisViolation("|Re nu| < M + 1/2")
    limiting = near_integer(2 * x) is not None and near_integer(2 * x) % 2 == 1
    value = abs(mpmath.cospi(nu)) * real_gamma(mpf(1) / 2 + x + M) * real_gamma(mpf(1) / 2 - x + M)
    value /= mpmath.pi * mpf(2) ** M * math.factorial(M)
    return abs(value), limiting


def hyper_bound(mu: Number, nu: Number, z: Number, N: int, M: int, arg: Number | None = None) -> BoundReport:
    """Bound on the re-expansion remainder ``R_{N,M}`` for ``|arg z| <= pi/2``.

    The bound is on the remainder inside the bracket; the error of the
    re-expanded value of ``S`` is this times ``|2^{mu+1} / (Gamma(a) Gamma(b))|``.
    Refused with :class:`DegenerateBoundError` when ``nu`` is a half-odd
    integer and ``M >= 1``, where the closed form collapses to zero.
    """
    mu, nu = to_mpc(mu), to_mpc(nu)
    r, theta = _polar(z, arg)
    pi = mpmath.pi
    if M < 0:
        raise ParameterError("M must be non-negative")
    if not abs(theta) <= pi / 2:
        raise HypothesisViolation("|arg z| <= pi/2")
    if not mu.real < 2 * N - M + mpf(1) / 2:
        raise HypothesisViolation("Re mu < 2N - M + 1/2")
    coeff, limiting = besselk_coeff_factor(nu, M)
    if M >= 1 and mpmath.cospi(nu) == 0:
        raise DegenerateBoundError("cos(pi nu) = 0: the coefficient factor vanishes identically")
    p = 2 * N - M - mu + mpf(1) / 2
    zc = r * mpmath.expj(theta)
    t_up = terminant(p, 1j * zc, arg_w=theta + pi / 2).value
    t_down = terminant(p, -1j * zc, arg_w=theta - pi / 2).value
    front = mpmath.sqrt(pi / (2 * r)) * coeff / r**M
    term1 = pi * abs(mpmath.expj(pi * mu / 2)) * front * abs(mpmath.expj(zc) * t_up)
    term2 = pi * abs(mpmath.expj(-pi * mu / 2)) * front * abs(mpmath.expj(2 * pi * mu) * mpmath.expj(-zc) * t_down)
    term3 = mpmath.sqrt(pi / 2) * _abs_power(r, theta, mu) * coeff * real_gamma(2 * N - M - mu.real + mpf(1) / 2) / r ** (2 * N + 1)
    return BoundReport(term1 + term2 + term3, "hyper_reexpansion", limiting)


# -- Euler-transformed tail ---------------------------------------------------------


def even_M_euler_bound(mu: Number, nu: Number, z: Number, N: int, M: int) -> BoundReport:
    """Bound on the Euler-tail remainder for even ``M`` and ``|arg z| < pi/2``.

    ``|z^{mu-1}| |v_{N,M}(z; Re mu, Re nu)| ell_hat(theta)`` with the Gamma
    ratio folded into the coefficients.
    """
    mu, nu = to_mpc(mu), to_mpc(nu)
    if M < 0 or M % 2:
        raise HypothesisViolation("M even and non-negative")
    r, theta = _polar(z, None)
    if not abs(theta) < mpmath.pi / 2:
        raise HypothesisViolation("|arg z| < pi/2")
    _check_validity(mu, nu, N)
    coeffs, form, limiting = scaled_coefficients([N + k for k in range(M + 1)], mu, nu)
    total = mpf(0)
    for k in range(M + 1):
        total += math.comb(M, k) * (-1) ** k * coeffs[k] / r ** (2 * k)
    v_abs = abs(total) / r ** (2 * N) / (2 * abs(mpmath.cos(theta))) ** (M + 1)
    factor = ell_hat(theta)
    bound = _abs_power(r, theta, mu - 1) * v_abs * factor
    return BoundReport(bound, "even_M_euler", limiting, None, factor)
