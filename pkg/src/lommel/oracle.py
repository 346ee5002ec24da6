"""Independent reference values for the Lommel function and its remainders.

Everything here runs at the oracle precision and uses mpmath's Gamma and
Bessel functions, never the asymptotic machinery, so it can referee the
engine.  Two kinds of reference exist:

* the convergent route: the small Lommel function ``s`` by its
  hypergeometric series plus the Bessel connection formula, continued past
  ``|arg z| = pi`` by the continuation identity;
* quadrature routes for the integral representations of the remainders.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Sequence

import mpmath
from mpmath import mp, mpc, mpf

from . import bessel
from .coefficients import besselk_coeffs
from .errors import (
    CancellationError,
    HypothesisViolation,
    ParameterError,
    PoleError,
    QuadratureCancelled,
    QuadratureError,
)
from .numerics import Number, current_precision, near_integer, oracle_scope, to_mpc, to_mpf

MAX_BITS = 20000


@dataclass(frozen=True)
class OracleValue:
    value: mpc
    est_error: mpf
    method: str


@dataclass
class QuadratureSpec:
    """Options for the oracle quadratures.

    ``cancel`` is polled inside the integrand; setting it aborts the
    quadrature with :class:`QuadratureCancelled`.
    """

    scheme: str = "tanh_sinh"
    max_degree: int | None = None
    extra_bits: int = 16
    tolerance_digits: int | None = None
    cancel: threading.Event | None = field(default=None, compare=False)


_SCHEMES = {"tanh_sinh": "tanh-sinh", "gauss_legendre": "gauss-legendre"}


def integrate(f: Callable[[mpf], mpc], points: Sequence[mpf], spec: QuadratureSpec | None = None) -> tuple[mpc, mpf]:
    """Integrate over consecutive ``points`` (the last may be ``mpmath.inf``)."""
    spec = spec or QuadratureSpec()
    try:
        method = _SCHEMES[spec.scheme]
    except KeyError:
        raise ParameterError(f"unknown quadrature scheme {spec.scheme!r}") from None
    cancel = spec.cancel

    def g(t: mpf) -> mpc:
        if cancel is not None and cancel.is_set():
            raise QuadratureCancelled("quadrature cancelled")
        return f(t)

    kwargs = {"method": method, "error": True}
    if spec.max_degree is not None:
        kwargs["maxdegree"] = spec.max_degree
    value, err = mpmath.quad(g, list(points), **kwargs)
    digits = spec.tolerance_digits
    if digits is None:
        digits = current_precision().oracle_digits - 8
    scale = max(abs(value), mpf(2) ** (-mp.prec))
    if err > scale * mpf(10) ** (-digits):
        raise QuadratureError(f"quadrature error estimate {mpmath.nstr(err, 5)} exceeds target")
    return mpc(value), mpf(err)


def _params(mu: Number, nu: Number) -> tuple[mpc, mpc]:
    return to_mpc(mu), to_mpc(nu)


def _is_negative_odd(x: mpc) -> bool:
    if x.imag != 0:
        return False
    n = near_integer(x.real)
    return n is not None and n < 0 and n % 2 == 1


def _check_connection_poles(mu: mpc, nu: mpc) -> None:
    if _is_negative_odd(mu + nu) or _is_negative_odd(mu - nu):
        raise PoleError("mu + nu or mu - nu is a negative odd integer; the convergent route degenerates")


def _hyp1f2_unit(b1: mpc, b2: mpc, x: mpc, eps: mpf) -> tuple[mpc, mpf]:
    """``1F2(1; b1, b2; x)`` and the largest term magnitude."""
    term = mpc(1)
    total = mpc(1)
    biggest = mpf(1)
    k = 0
    while True:
        term = term * x / ((b1 + k) * (b2 + k))
        total += term
        k += 1
        a = abs(term)
        if a > biggest:
            biggest = a
        if a <= eps * biggest and k > 2 and abs(x) < 0.25 * abs((b1 + k) * (b2 + k)):
            return total, biggest
        if k > 10**6:
            raise CancellationError("hypergeometric series failed to converge")


def lommel_s_series(mu: Number, nu: Number, z: Number) -> OracleValue:
    """Small Lommel function ``s_{mu,nu}(z)`` by its convergent series (principal branch)."""
    mu, nu = _params(mu, nu)
    z = to_mpc(z)
    denom = (mu + 1) ** 2 - nu**2
    if denom == 0 or _is_negative_odd(mu + nu) or _is_negative_odd(mu - nu):
        raise PoleError("s_{mu,nu} is undefined when mu +- nu is a negative odd integer")
    eps = mpf(2) ** (-mp.prec - 4)
    series, biggest = _hyp1f2_unit((mu - nu + 3) / 2, (mu + nu + 3) / 2, -z * z / 4, eps)
    scale = mpmath.exp((mu + 1) * mpmath.log(z)) / denom
    value = scale * series
    return OracleValue(value, abs(scale) * biggest * mpf(2) ** (8 - mp.prec), "series")


def _connection(mu: mpc, nu: mpc, z: mpc) -> tuple[mpc, mpf]:
    small = lommel_s_series(mu, nu, z)
    g = mpmath.gamma((mu - nu + 1) / 2) * mpmath.gamma((mu + nu + 1) / 2)
    phase = (mu - nu) * mpmath.pi / 2
    jv = bessel.besselj(nu, z)
    yv = bessel.bessely(nu, z)
    big = mpmath.power(2, mu - 1) * g * (mpmath.sin(phase) * jv - mpmath.cos(phase) * yv)
    value = small.value + big
    magnitude = max(abs(small.value), abs(big), small.est_error * mpf(2) ** (mp.prec - 8))
    return value, magnitude


def _principal_reference(mu: mpc, nu: mpc, z: mpc) -> OracleValue:
    _check_connection_poles(mu, nu)
    target = current_precision().oracle_bits
    guard = 32 + math.ceil(float(abs(z)) * 1.4427) + math.ceil(abs(float(mpmath.im(mu))) * 2.3)
    while True:
        bits = target + guard
        if bits > MAX_BITS:
            raise CancellationError(f"convergent route needs more than {MAX_BITS} bits")
        with mp.workprec(bits):
            value, magnitude = _connection(mu, nu, z)
            if value == 0:
                lost = guard
            else:
                lost = max(0, int(mpmath.log(magnitude / abs(value), 2)) + 1)
        if lost + 24 <= guard:
            err = abs(value) * mpf(2) ** (-target) + magnitude * mpf(2) ** (8 - bits)
            return OracleValue(value, err, "series_connection")
        guard = lost + 48


def lommel_S_reference(mu: Number, nu: Number, z: Number, arg: Number | None = None) -> OracleValue:
    """Reference value of ``S_{mu,nu}(z)``.

    ``arg`` selects the branch: by default the principal argument of ``z``.
    For ``|arg| > pi`` the continuation identity across the Stokes line
    reduces the evaluation to the principal sector.
    """
    mu, nu = _params(mu, nu)
    with oracle_scope(16):
        z = to_mpc(z)
        if z == 0:
            raise ParameterError("z must be non-zero")
        theta = mpmath.arg(z) if arg is None else to_mpf(arg)
        r = abs(z)
        if abs(theta) > 2 * mpmath.pi:
            raise ParameterError("|arg z| must not exceed 2 pi")
        if -mpmath.pi < theta <= mpmath.pi:
            return _principal_reference(mu, nu, mpmath.mpc(r * mpmath.expj(theta)))
        return _continued_reference(mu, nu, r, theta)


def _continued_reference(mu: mpc, nu: mpc, r: mpf, theta: mpf) -> OracleValue:
    # S(z) = P pi e^{+-i pi mu/2} K_nu(z e^{-+ i pi/2}) - e^{+-i pi mu} S(z e^{-+ i pi})
    sign = 1 if theta > 0 else -1
    pref = mpmath.power(2, mu + 1) * mpmath.rgamma((nu - mu + 1) / 2) * mpmath.rgamma((1 - mu - nu) / 2)
    inner = lommel_S_reference(mu, nu, r * mpmath.expj(theta - sign * mpmath.pi), theta - sign * mpmath.pi)
    kz = r * mpmath.expj(theta - sign * mpmath.pi / 2)
    with mp.workprec(mp.prec + 32):
        k = bessel.besselk(nu, kz)
        value = pref * mpmath.pi * mpmath.expj(sign * mpmath.pi * mu / 2) * k - mpmath.expj(sign * mpmath.pi * mu) * inner.value
    err = inner.est_error * abs(mpmath.expj(sign * mpmath.pi * mu)) + abs(value) * mpf(2) ** (-mp.prec)
    return OracleValue(value, err, "continuation")


def remainder_reference(mu: Number, nu: Number, z: Number, N: int, arg: Number | None = None) -> OracleValue:
    """``R_N = S - z^{mu-1} sum_{n<N} (-1)^n a_n(-mu,nu) z^{-2n}`` from the reference ``S``."""
    mu, nu = _params(mu, nu)
    ref = lommel_S_reference(mu, nu, z, arg)
    with oracle_scope(16):
        z = to_mpc(z)
        theta = mpmath.arg(z) if arg is None else to_mpf(arg)
        r = abs(z)
        zpow = mpmath.exp((mu - 1) * mpc(mpmath.log(r), theta))
        inv2 = mpmath.expj(-2 * theta) / (r * r)
        total = mpc(0)
        a = mpc(1)
        p = mpc(1)
        for n in range(N):
            total += a * p
            a *= -(((-mu + 2 * n + 1) ** 2) - nu**2)
            p *= inv2
        value = ref.value - zpow * total
    return OracleValue(value, ref.est_error, ref.method)


# -- quadrature routes -------------------------------------------------------


def _check_stieltjes(mu: mpc, nu: mpc, z: mpc, N: int) -> None:
    if not abs(mpmath.arg(z)) < mpmath.pi / 2:
        raise HypothesisViolation("|arg z| < pi/2")
    if not mu.real + abs(nu.real) < 2 * N + 1:
        raise HypothesisViolation("Re mu + |Re nu| < 2N + 1")


def _exp_cutoff(power: float, bits: int, start: float) -> float:
    """Point beyond which ``t^power e^{-t}`` is below ``2^-bits`` of its peak."""
    peak = max(power, 1.0)
    target = bits * math.log(2)
    t = max(start, peak) + target
    while power * math.log(t / peak) - (t - peak) > -target:
        t *= 1.25
    return t


def _breakpoints(*pts: float) -> list[mpf]:
    out = sorted({float(p) for p in pts if p > 0})
    return [mpf(0)] + [mpf(p) for p in out]


def stieltjes_remainder(mu: Number, nu: Number, z: Number, N: int, spec: QuadratureSpec | None = None) -> OracleValue:
    """``R_N`` from its Stieltjes-type integral against ``K_nu``.

    Requires ``|arg z| < pi/2`` and ``Re mu + |Re nu| < 2N + 1``.
    """
    mu, nu = _params(mu, nu)
    spec = spec or QuadratureSpec()
    with oracle_scope(spec.extra_bits):
        z = to_mpc(z)
        _check_stieltjes(mu, nu, z, N)
        r = abs(z)
        power = float(2 * N - mu.real)
        top = _exp_cutoff(power, mp.prec, float(r))
        pts = _breakpoints(float(r) / 2, float(r), max(power, 1.0), 2 * float(r), top)
        s = 2 * N - mu
        inv2 = 1 / (z * z)

        def f(t: mpf) -> mpc:
            return mpmath.exp(s * mpmath.log(t)) * bessel.besselk(nu, t) / (1 + t * t * inv2)

        integral, err = integrate(f, pts, spec)
        pref = (-1) ** N * mpmath.power(2, mu + 1) * mpmath.exp((mu - 2 * N - 1) * mpmath.log(z))
        pref *= mpmath.rgamma((nu - mu + 1) / 2) * mpmath.rgamma((1 - mu - nu) / 2)
        return OracleValue(pref * integral, abs(pref) * err, "stieltjes_quadrature")


def oscillatory_remainder(mu: Number, nu: Number, z: Number, N: int, spec: QuadratureSpec | None = None) -> OracleValue:
    """``R_N`` from its representation with a ``J_nu`` kernel plus a ``K_nu`` correction.

    Requires ``0 < |arg z| < pi``, ``Re mu - Re nu < 2N + 1`` and
    ``2N - 3/2 < Re mu``.
    """
    mu, nu = _params(mu, nu)
    spec = spec or QuadratureSpec()
    with oracle_scope(spec.extra_bits):
        z = to_mpc(z)
        theta = mpmath.arg(z)
        if not (0 < abs(theta) < mpmath.pi):
            raise HypothesisViolation("0 < |arg z| < pi")
        if not mu.real - nu.real < 2 * N + 1:
            raise HypothesisViolation("Re mu - Re nu < 2N + 1")
        if not 2 * N - mpf(3) / 2 < mu.real:
            raise HypothesisViolation("2N - 3/2 < Re mu")
        sign = 1 if theta > 0 else -1
        s = 2 * N - mu
        inv2 = 1 / (z * z)

        def f(t: mpf) -> mpc:
            return mpmath.exp(s * mpmath.log(t)) * bessel.besselj(nu, t) / (1 - t * t * inv2)

        start = float(2 * abs(z) + abs(nu) + 10)
        head, err = integrate(f, _breakpoints(float(abs(z)) / 2, float(abs(z)), start), spec)
        # Past the poles at t = +-z, split J into Hankel functions and send
        # each along a vertical ray where it decays exponentially.
        a = mpf(start)

        def ray(direction: int) -> Callable[[mpf], mpc]:
            # H^(1,2)_nu(t) = +-(2/(pi i)) e^{-+i pi nu/2} K_nu(-+i t)
            c = direction * 2 / (mpmath.pi * 1j) * mpmath.expj(-direction * mpmath.pi * nu / 2)

            def g(y: mpf) -> mpc:
                t = mpc(a, direction * y)
                h = c * bessel.besselk(nu, -direction * 1j * t)
                return mpmath.exp(s * mpmath.log(t)) * h / (1 - t * t * inv2)

            return g

        top = float(mp.prec * math.log(2) + 40)
        up, err_up = integrate(ray(1), _breakpoints(5.0, 40.0, top), spec)
        down, err_down = integrate(ray(-1), _breakpoints(5.0, 40.0, top), spec)
        integral = head + (1j * up - 1j * down) / 2
        err = err + err_up + err_down
        kz = z * mpmath.expj(-sign * mpmath.pi / 2)
        corr = mpmath.expj(-sign * mpmath.pi * nu / 2) * bessel.besselk(nu, kz)
        pref = mpmath.power(2, mu) * mpmath.gamma((mu + nu + 1) / 2) * mpmath.rgamma((nu - mu + 1) / 2)
        value = pref * (mpmath.exp((mu - 2 * N - 1) * mpmath.log(z)) * integral + corr)
        return OracleValue(value, abs(pref * mpmath.exp((mu - 2 * N - 1) * mpmath.log(z))) * err, "oscillatory_quadrature")


def coeff_integral_check(N: int, mu: Number, nu: Number, spec: QuadratureSpec | None = None) -> OracleValue:
    """``a_N(-mu, nu)`` recomputed from the product of its two defining integrals.

    The ``u``-integral is a Gamma integral and the ``s``-integral runs over
    ``cosh(nu s) cosh(s)^(mu-2N-1)``; both are done by quadrature.
    """
    mu, nu = _params(mu, nu)
    spec = spec or QuadratureSpec()
    decay = 2 * N + 1 - mu.real - abs(nu.real)
    if not decay > 0:
        raise HypothesisViolation("Re mu + |Re nu| < 2N + 1")
    with oracle_scope(spec.extra_bits):
        s = 2 * N - mu
        power = float(s.real)
        top = _exp_cutoff(power, mp.prec, 1.0)
        u_int, err_u = integrate(lambda u: mpmath.exp(s * mpmath.log(u)) * mpmath.exp(-u), _breakpoints(max(power, 1.0), top), spec)
        s_top = float(mp.prec * math.log(2) / float(decay) + 10)
        ex = mu - 2 * N - 1

        def g(x: mpf) -> mpc:
            return mpmath.cosh(nu * x) * mpmath.exp(ex * mpmath.log(mpmath.cosh(x)))

        s_int, err_s = integrate(g, _breakpoints(1.0, s_top / 4, s_top), spec)
        pref = mpmath.power(2, mu + 1) * mpmath.rgamma((nu - mu + 1) / 2) * mpmath.rgamma((1 - mu - nu) / 2)
        value = pref * u_int * s_int
        err = abs(pref) * (abs(u_int) * err_s + abs(s_int) * err_u)
        return OracleValue(value, err, "double_integral")


def kernel_remainder_M(mu: Number, nu: Number, z: Number, N: int, M: int, spec: QuadratureSpec | None = None) -> OracleValue:
    """Re-expansion remainder ``R_{N,M}`` by quadrature of the truncated ``K_nu`` tail.

    ``R_{N,M} = (-1)^N z^{mu-2N-1} int t^{2N-mu} K_M(t) / (1 + (t/z)^2) dt`` where
    ``K_M`` is ``K_nu`` minus its first ``M`` large-argument terms.  Needs
    ``|arg z| < pi/2``, ``Re mu < 2N - M + 1/2`` and ``Re mu + |Re nu| < 2N + 1``.
    """
    mu, nu = _params(mu, nu)
    spec = spec or QuadratureSpec()
    with oracle_scope(spec.extra_bits):
        z = to_mpc(z)
        if not abs(mpmath.arg(z)) < mpmath.pi / 2:
            raise HypothesisViolation("|arg z| < pi/2")
        if not mu.real < 2 * N - M + mpf(1) / 2:
            raise HypothesisViolation("Re mu < 2N - M + 1/2")
        if not mu.real + abs(nu.real) < 2 * N + 1:
            raise HypothesisViolation("Re mu + |Re nu| < 2N + 1")
        coeffs = besselk_coeffs(M, nu)
        s = 2 * N - mu
        inv2 = 1 / (z * z)
        half_pi = mpmath.pi / 2

        def f(t: mpf) -> mpc:
            lead = mpmath.sqrt(half_pi / t) * mpmath.exp(-t)
            partial = mpc(0)
            tp = mpc(1)
            for m in range(M):
                partial += coeffs[m] * tp
                tp /= t
            km = bessel.besselk(nu, t) - lead * partial
            return mpmath.exp(s * mpmath.log(t)) * km / (1 + t * t * inv2)

        r = float(abs(z))
        power = float(s.real)
        top = _exp_cutoff(power, mp.prec, r)
        with mp.workprec(mp.prec + 64):
            integral, err = integrate(f, _breakpoints(1.0, r / 2, r, max(power, 1.0), 2 * r, top), spec)
        pref = (-1) ** N * mpmath.exp((mu - 2 * N - 1) * mpmath.log(z))
        return OracleValue(pref * integral, abs(pref) * err, "truncated_kernel_quadrature")


def euler_tail_remainder(mu: Number, nu: Number, z: Number, N: int, M: int, spec: QuadratureSpec | None = None) -> OracleValue:
    """Euler-transformed tail remainder by quadrature over the unit-scaled variable.

    ``(-1)^N 2^{mu+1} e^{i theta (mu-2N-1)} alpha^M / (Gamma Gamma)
    * int K_nu(r tau) tau^{2N-mu} (1 - tau^2)^M / (1 + tau^2 e^{-2 i theta}) d tau``
    with ``alpha = 1/(1 + e^{2 i theta})``.
    """
    mu, nu = _params(mu, nu)
    spec = spec or QuadratureSpec()
    with oracle_scope(spec.extra_bits):
        z = to_mpc(z)
        theta = mpmath.arg(z)
        if not abs(theta) < mpmath.pi / 2:
            raise HypothesisViolation("|arg z| < pi/2")
        if not mu.real + abs(nu.real) < 2 * N + 1:
            raise HypothesisViolation("Re mu + |Re nu| < 2N + 1")
        r = abs(z)
        s = 2 * N - mu
        rot = mpmath.expj(-2 * theta)

        def f(tau: mpf) -> mpc:
            return bessel.besselk(nu, r * tau) * mpmath.exp(s * mpmath.log(tau)) * (1 - tau * tau) ** M / (1 + tau * tau * rot)

        power = float(s.real) + 2 * M
        top = _exp_cutoff(power, mp.prec, float(r)) / float(r)
        pts = _breakpoints(0.5, 1.0, max(power, 1.0) / float(r), 2.0, top)
        integral, err = integrate(f, pts, spec)
        alpha = 1 / (1 + mpmath.expj(2 * theta))
        pref = (-1) ** N * mpmath.power(2, mu + 1) * mpmath.expj(theta * (mu - 2 * N - 1)) * alpha**M
        pref *= mpmath.rgamma((nu - mu + 1) / 2) * mpmath.rgamma((1 - mu - nu) / 2)
        return OracleValue(pref * integral, abs(pref) * err, "euler_tail_quadrature")
