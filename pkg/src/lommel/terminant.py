"""Terminant function ``T_p(w) = e^{i pi p} Gamma(p) Gamma(1-p, w) / (2 pi i)`` and its erf model.

The terminant is multivalued in ``w``; every routine takes the branch from
an explicit ``arg_w`` (default: principal).  Three evaluation routes:

``series``
    ``Gamma(1-p, w) = Gamma(1-p) - gamma(1-p, w)`` with the entire lower
    series; valid on every branch, with an exact limit for integer ``p``.
``cf``
    modified Lentz continued fraction, for large ``|w|`` away from the
    negative real axis.
``integral``
    tanh-sinh quadrature of the defining integral (``Re p > 0``,
    ``|arg w| < pi``); slow, kept for verification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
from mpmath import mp, mpc, mpf

from .errors import CancellationError, HypothesisViolation, ParameterError
from .numerics import Number, complex_gamma, erf_c, near_integer, to_mpc, to_mpf

MAX_BITS = 20000


@dataclass(frozen=True)
class TerminantEval:
    value: mpc
    method: str
    est_error: mpf


def _resolve_arg(w: mpc, arg_w: Number | None) -> tuple[mpf, mpf]:
    r = abs(w)
    if r == 0:
        raise ParameterError("terminant needs w != 0")
    theta = mpmath.arg(w) if arg_w is None else to_mpf(arg_w)
    return r, theta


def terminant(p: Number, w: Number, arg_w: Number | None = None, method: str = "auto") -> TerminantEval:
    """Evaluate the terminant on the branch ``arg w = arg_w``."""
    p = to_mpc(p)
    w = to_mpc(w)
    r, theta = _resolve_arg(w, arg_w)
    if method == "auto":
        method = "cf" if _cf_suitable(p, r, theta) else "series"
    if method == "series":
        return _series(p, r, theta)
    if method in ("cf", "integral"):
        return _via_principal(p, r, theta, method)
    raise ParameterError(f"unknown terminant method {method!r}")


def _cf_suitable(p: mpc, r: mpf, theta: mpf) -> bool:
    return r > max(20, abs(1 - p) / 2) and abs(theta) <= 3 * mpmath.pi / 4


def _via_principal(p: mpc, r: mpf, theta: mpf, method: str) -> TerminantEval:
    # T(w e^{2 pi i}) = e^{-2 pi i p} T(w) + 1 moves any branch to the principal one
    pi = mpmath.pi
    if theta > pi:
        inner = _via_principal(p, r, theta - 2 * pi, method)
        return TerminantEval(mpmath.expj(-2 * pi * p) * inner.value + 1, inner.method, inner.est_error)
    if theta <= -pi:
        inner = _via_principal(p, r, theta + 2 * pi, method)
        return TerminantEval(mpmath.expj(2 * pi * p) * (inner.value - 1), inner.method, inner.est_error)
    if method == "cf":
        return _continued_fraction(p, r, theta)
    return _integral(p, r, theta)


def _log_w(r: mpf, theta: mpf) -> mpc:
    return mpc(mpmath.log(r), theta)


def _series(p: mpc, r: mpf, theta: mpf) -> TerminantEval:
    target = mp.prec
    guard = 40 + math.ceil(float(r) * 1.4427) + math.ceil(abs(float(p.imag)) * 4.6 + abs(float(theta * p.imag)) * 1.5)
    s = mpmath.sinpi(p)
    if s != 0:
        guard += max(0, -int(mpmath.log(abs(s), 2)))
    while True:
        bits = target + guard
        if bits > MAX_BITS:
            raise CancellationError(f"terminant series needs more than {MAX_BITS} bits")
        with mp.workprec(bits):
            value, magnitude = _series_at_precision(p, r, theta)
            lost = 0 if value == 0 else max(0, int(mpmath.log(magnitude / abs(value), 2)) + 1)
        if lost + 24 <= guard:
            return TerminantEval(+value, "series", abs(value) * mpf(2) ** (8 - target))
        guard = lost + 48


def _series_at_precision(p: mpc, r: mpf, theta: mpf) -> tuple[mpc, mpf]:
    w = r * mpmath.expj(theta)
    logw = _log_w(r, theta)
    eps = mpf(2) ** (-mp.prec)
    n = near_integer(p.real, mp.prec // 2) if p.imag == 0 else None
    if n is not None and n >= 1 and p.real == n:
        return _series_integer(n, w, logw, eps)
    # gamma(a, w) = w^a sum_k (-w)^k / (k! (a + k)),  a = 1 - p
    a = 1 - p
    total = mpc(0)
    term = mpc(1)
    biggest = mpf(0)
    k = 0
    while True:
        contrib = term / (a + k)
        total += contrib
        mag = abs(contrib)
        if mag > biggest:
            biggest = mag
        k += 1
        term = term * (-w) / k
        if k > abs(w) + 2 and abs(term) < eps * biggest:
            break
    gp = mpmath.gamma(p)
    lower = mpmath.exp(a * logw) * total
    first = mpmath.expj(mpmath.pi * p) / (2j * mpmath.sinpi(p))
    second = -mpmath.expj(mpmath.pi * p) * gp * lower / (2j * mpmath.pi)
    magnitude = max(abs(first), abs(mpmath.expj(mpmath.pi * p) * gp * mpmath.exp(a * logw)) * biggest / (2 * mpmath.pi))
    return first + second, magnitude


def _series_integer(n: int, w: mpc, logw: mpc, eps: mpf) -> tuple[mpc, mpf]:
    # Gamma(-m, w) = (-1)^m/m! (E1(w) - e^{-w} sum_{k<m} (-1)^k k!/w^{k+1}),  m = n - 1
    m = n - 1
    s = mpc(0)
    term = mpc(-w)
    biggest = mpf(0)
    k = 1
    while True:
        contrib = term / k
        s += contrib
        biggest = max(biggest, abs(contrib))
        term = term * (-w) / (k + 1)
        k += 1
        if k > abs(w) + 2 and abs(term) < eps * biggest:
            break
    e1 = -mpmath.euler - logw - s
    finite = mpc(0)
    fact = mpf(1)
    wpow = 1 / w
    for k in range(m):
        finite += (-1) ** k * fact * wpow
        fact *= k + 1
        wpow /= w
    upper = (-1) ** m / mpmath.factorial(m) * (e1 - mpmath.exp(-w) * finite)
    scale = mpmath.expj(mpmath.pi * n) * mpmath.factorial(n - 1) / (2j * mpmath.pi)
    value = scale * upper
    magnitude = abs(scale) / mpmath.factorial(m) * max(biggest, abs(e1), abs(mpmath.exp(-w) * finite))
    return value, magnitude


def _continued_fraction(p: mpc, r: mpf, theta: mpf) -> TerminantEval:
    if abs(theta) >= mpmath.pi:
        raise ParameterError("continued fraction needs |arg w| < pi")
    w = r * mpmath.expj(theta)
    a = 1 - p
    with mp.workprec(mp.prec + 30):
        tiny = mpf(2) ** (-2 * mp.prec)
        eps = mpf(2) ** (-mp.prec + 10)
        b = w + 1 - a
        c = 1 / tiny
        d = 1 / b
        h = d
        i = 1
        while True:
            an = -i * (i - a)
            b += 2
            d = an * d + b
            if abs(d) < tiny:
                d = tiny
            c = b + an / c
            if abs(c) < tiny:
                c = tiny
            d = 1 / d
            delta = d * c
            h *= delta
            if abs(delta - 1) < eps:
                break
            i += 1
            if i > 200000:
                raise CancellationError("continued fraction did not converge")
        # Gamma(a, w) = e^{-w} w^a h; T = e^{i pi p} Gamma(p) Gamma(a, w) / (2 pi i)
        upper = mpmath.exp(-w + a * _log_w(r, theta)) * h
        value = mpmath.expj(mpmath.pi * p) * complex_gamma(p) * upper / (2j * mpmath.pi)
    return TerminantEval(+value, "cf", abs(value) * mpf(2) ** (8 - mp.prec))


def _integral(p: mpc, r: mpf, theta: mpf) -> TerminantEval:
    if not p.real > 0:
        raise HypothesisViolation("Re p > 0")
    if abs(theta) >= mpmath.pi:
        raise HypothesisViolation("|arg w| < pi")
    w = r * mpmath.expj(theta)
    with mp.workprec(mp.prec + 30):
        s = p - 1

        def f(t: mpf) -> mpc:
            return mpmath.exp(s * mpmath.log(t) - t) / (w + t)

        peak = max(float(p.real) - 1, 1.0)
        pts = [0, peak / 2, peak, float(r), 2 * peak + 10, mpmath.inf]
        pts = [mpf(x) for x in sorted(set(pts[:-1]))] + [mpmath.inf]
        integral, err = mpmath.quad(f, pts, error=True)
        scale = mpmath.expj(mpmath.pi * p) * mpmath.exp((1 - p) * _log_w(r, theta) - w) / (2j * mpmath.pi)
        value = scale * integral
    return TerminantEval(+value, "integral", abs(scale) * err + abs(value) * mpf(2) ** (8 - mp.prec))


# -- erf model ---------------------------------------------------------------


def stokes_c(phi: Number) -> mpc:
    """Root ``c(phi)`` of ``c^2/2 = 1 + i(phi - pi) - e^{i(phi - pi)}`` with ``c ~ phi - pi``.

    ``c = x sqrt(2 (1 + i x - e^{ix}) / x^2)`` with ``x = phi - pi``; the
    radicand has non-negative real part for ``|x| < 2 pi`` so the principal
    square root is the continuous branch.
    """
    phi = to_mpf(phi)
    x = phi - mpmath.pi
    if not abs(x) < 2 * mpmath.pi:
        raise ParameterError("stokes_c needs -pi < phi < 3 pi")
    if x == 0:
        return mpc(0)
    extra = 2 * max(0, -int(mpmath.log(abs(x), 2))) + 16
    with mp.workprec(mp.prec + extra):
        g = 2 * (1 + 1j * x - mpmath.expj(x)) / (x * x)
        c = x * mpmath.sqrt(g)
    return +c


def terminant_erf_approx(p: Number, w: Number, arg_w: Number | None = None, side: str = "upper") -> mpc:
    """Leading uniform approximation of the terminant.

    ``side="upper"`` (``-pi < arg w < 3 pi``) gives ``1/2 + erf(c(phi) sqrt(|w|/2))/2``.
    ``side="lower"`` (``-3 pi < arg w < pi``) gives
    ``e^{2 pi i p} (-1/2 + erf(-conj(c(-phi)) sqrt(|w|/2))/2)``, the same
    quantity normalized back to ``T_p(w)``.
    """
    p = to_mpc(p)
    r, phi = _resolve_arg(to_mpc(w), arg_w)
    scale = mpmath.sqrt(r / 2)
    if side == "upper":
        if not -mpmath.pi < phi < 3 * mpmath.pi:
            raise ParameterError("upper approximation needs -pi < arg w < 3 pi")
        return mpc(0.5) + erf_c(stokes_c(phi) * scale) / 2
    if side == "lower":
        if not -3 * mpmath.pi < phi < mpmath.pi:
            raise ParameterError("lower approximation needs -3 pi < arg w < pi")
        inner = mpc(-0.5) + erf_c(-mpmath.conj(stokes_c(-phi)) * scale) / 2
        return mpmath.expj(2 * mpmath.pi * p) * inner
    raise ParameterError(f"unknown side {side!r}")
