"""Struve, modified Struve and Anger-Weber functions through the Lommel function.

Each function has two routes: ``lommel_connection`` expresses it through
``S_{mu,nu}`` evaluated by the asymptotic engine (carrying its certified
bound), and an independent convergent route (``direct_series`` for the
Struve family, ``integral`` for Anger-Weber).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import factorial

import mpmath
from mpmath import mp, mpc, mpf

from . import bessel
from .coefficients import phi_coeff, struve_c
from .errors import CancellationError, ParameterError
from .expansion import lommel_S
from .numerics import Number, complex_gamma, to_mpc, to_mpf

MAX_BITS = 20000


@dataclass(frozen=True)
class StruveEval:
    kind: str
    value: mpc
    est_error: mpf | None
    route: str


def _struve_scale(nu: mpc) -> mpc:
    # K_nu = 2^{1-nu} / (sqrt(pi) Gamma(nu + 1/2)) S_{nu,nu}
    return mpmath.power(2, 1 - nu) / (mpmath.sqrt(mpmath.pi) * complex_gamma(nu + mpf(1) / 2))


def _engine(mu: mpc, nu: mpc, z: Number, strategy: str, M: int, N: int | None, arg: Number | None):
    return lommel_S(mu, nu, z, strategy=strategy, N=N, M=M, arg=arg)


def _struve_series(nu: mpc, z: mpc, sign: int) -> tuple[mpc, mpf]:
    """``(z/2)^{nu+1} sum_k sign^k (z/2)^{2k} / (Gamma(k + 3/2) Gamma(k + nu + 3/2))``."""
    h = z / 2
    x = sign * h * h
    term = 1 / (mpmath.gamma(mpf(3) / 2) * mpmath.gamma(nu + mpf(3) / 2))
    total = term
    biggest = abs(term)
    eps = mpf(2) ** (-mp.prec - 4)
    k = 0
    while True:
        term = term * x / ((k + mpf(3) / 2) * (k + nu + mpf(3) / 2))
        total += term
        k += 1
        biggest = max(biggest, abs(term))
        if abs(term) <= eps * biggest and abs(x) < 0.25 * abs((k + 1) * (k + nu + 1)):
            break
    scale = mpmath.exp((nu + 1) * mpmath.log(h))
    return scale * total, abs(scale) * biggest


def _direct(nu: mpc, z: mpc, kind: str) -> StruveEval:
    target = mp.prec
    guard = 40 + math.ceil(float(abs(z)) * 1.4427)
    while True:
        bits = target + guard
        if bits > MAX_BITS:
            raise CancellationError(f"direct Struve series needs more than {MAX_BITS} bits")
        with mp.workprec(bits):
            if kind == "K":
                series, big = _struve_series(nu, z, -1)
                other = bessel.bessely(nu, z)
            else:
                series, big = _struve_series(nu, z, 1)
                other = bessel.besseli(nu, z)
            value = series - other
            magnitude = max(big, abs(other))
            lost = 0 if value == 0 else max(0, int(mpmath.log(magnitude / abs(value), 2)) + 1)
        if lost + 24 <= guard:
            return StruveEval(f"{kind}_struve", +value, abs(value) * mpf(2) ** (8 - target), "direct_series")
        guard = lost + 48


def struve_K(
    nu: Number,
    z: Number,
    route: str = "lommel_connection",
    strategy: str = "hyper",
    M: int = 3,
    N: int | None = None,
    arg: Number | None = None,
) -> StruveEval:
    """``K_nu(z) = H_nu(z) - Y_nu(z)``."""
    nu = to_mpc(nu)
    if route == "direct_series":
        return _direct(nu, to_mpc(z), "K")
    if route != "lommel_connection":
        raise ParameterError(f"unknown route {route!r}")
    res = _engine(nu, nu, z, strategy, M, N, arg)
    scale = _struve_scale(nu)
    est = None if res.certified_bound is None else abs(scale) * res.certified_bound
    return StruveEval("K_struve", scale * res.value, est, "lommel_connection")


def struve_M(
    nu: Number,
    z: Number,
    route: str = "lommel_connection",
    strategy: str = "hyper",
    M: int = 3,
    N: int | None = None,
) -> StruveEval:
    """``M_nu(z) = L_nu(z) - I_nu(z)`` for ``-pi/2 <= arg z <= pi/2`` (principal branch).

    The connection route rotates to ``K_nu`` at ``z e^{+- i pi/2}``: upper
    rotation for ``arg z <= 0`` and lower rotation otherwise, so the
    rotated argument stays on the Stokes-line side where re-expansion is
    certified.
    """
    nu = to_mpc(nu)
    z = to_mpc(z)
    if route == "direct_series":
        return _direct(nu, z, "M")
    if route != "lommel_connection":
        raise ParameterError(f"unknown route {route!r}")
    r, theta = abs(z), mpmath.arg(z)
    if not abs(theta) <= mpmath.pi / 2:
        raise ParameterError("struve_M connection route needs |arg z| <= pi/2")
    pi = mpmath.pi
    sign = 1 if theta <= 0 else -1
    rot_theta = theta + sign * pi / 2
    kval = struve_K(nu, r * mpmath.expj(rot_theta), strategy=strategy, M=M, N=N, arg=rot_theta)
    bes = bessel.besselk(nu, z)
    # upper: -i e^{-i pi nu/2} K(z e^{i pi/2}) - 2/(pi i) e^{-i pi nu} K_nu(z); lower mirrors it
    value = -sign * 1j * mpmath.expj(-sign * pi * nu / 2) * kval.value - sign * 2 / (pi * 1j) * mpmath.expj(-sign * pi * nu) * bes
    est = None if kval.est_error is None else abs(mpmath.expj(-sign * pi * nu / 2)) * kval.est_error
    return StruveEval("M_struve", value, est, "lommel_connection")


def struve_M_large_order(nu: Number, lam: Number, n_max: int, form: str = "phi") -> StruveEval:
    """Large-order expansion of ``M_nu(lam nu)`` truncated after ``n = n_max``.

    ``form="phi"`` sums ``(-1)^n (2n)!/(n! lam^{2n}) phi_n(nu)``; ``form="c"``
    sums ``n! c_n(i lam) / nu^n``.  Both carry the prefactor
    ``-(lam nu/2)^{nu-1} / (sqrt(pi) Gamma(nu + 1/2))``.  ``est_error`` is the
    magnitude of the first omitted term.
    """
    nu, lam = to_mpf(nu), to_mpf(lam)
    if not (nu > 0 and lam > 0):
        raise ParameterError("large-order expansion needs nu > 0 and lam > 0")
    if n_max < 0:
        raise ParameterError("n_max must be non-negative")
    if n_max > nu / 2:
        raise ParameterError(f"n_max={n_max} exceeds nu/2; the expansion is divergent in this range")
    pref = -mpmath.exp((nu - 1) * mpmath.log(lam * nu / 2)) / (mpmath.sqrt(mpmath.pi) * complex_gamma(nu + mpf(1) / 2))

    def term(n: int) -> mpc:
        if form == "phi":
            return (-1) ** n * factorial(2 * n) / (factorial(n) * lam ** (2 * n)) * phi_coeff(n, nu)
        if form == "c":
            poly = struve_c(n)
            return factorial(n) * poly.evaluate({"l": 1j * lam}) / nu**n
        raise ParameterError(f"unknown form {form!r}")

    total = sum((term(n) for n in range(n_max + 1)), mpc(0))
    return StruveEval("M_struve", pref * total, abs(pref * term(n_max + 1)), f"large_order_{form}")


# -- Anger-Weber --------------------------------------------------------------------

ANGER_WEBER_KINDS = ("A", "J_minus_J", "E_plus_Y")


def anger_weber(
    kind: str,
    nu: Number,
    z: Number,
    route: str = "lommel_connection",
    strategy: str = "hyper",
    M: int = 3,
    N: int | None = None,
) -> StruveEval:
    """Anger-Weber combinations.

    ``A``: ``A_nu(z)``; ``J_minus_J``: ``J_nu(z) - J_nu(z)`` (Anger minus
    Bessel); ``E_plus_Y``: ``E_nu(z) + Y_nu(z)`` (Weber plus Bessel).
    ``route="integral"`` evaluates the defining integrals instead
    (``Re z > 0`` for ``A``).
    """
    if kind not in ANGER_WEBER_KINDS:
        raise ParameterError(f"unknown Anger-Weber kind {kind!r}")
    nu = to_mpc(nu)
    z = to_mpc(z)
    if route == "integral":
        return _anger_weber_integral(kind, nu, z)
    if route != "lommel_connection":
        raise ParameterError(f"unknown route {route!r}")
    pi = mpmath.pi
    s0 = _engine(mpc(0), nu, z, strategy, M, N, None)
    if nu == 0:
        s1_value, s1_bound = mpc(0), mpf(0)
    else:
        s1 = _engine(mpc(-1), nu, z, strategy, M, N, None)
        s1_value, s1_bound = nu * s1.value, (None if s1.certified_bound is None else abs(nu) * s1.certified_bound)
    b0 = s0.certified_bound
    if kind == "A":
        value = (s0.value - s1_value) / pi
        c0, c1 = 1 / pi, 1 / pi
    elif kind == "J_minus_J":
        sp = mpmath.sinpi(nu)
        value = sp / pi * (s0.value - s1_value)
        c0 = c1 = abs(sp) / pi
    else:
        cp = mpmath.cospi(nu)
        value = ((cp - 1) * s1_value - (cp + 1) * s0.value) / pi
        c0, c1 = abs(cp + 1) / pi, abs(cp - 1) / pi
    est = None
    if b0 is not None and s1_bound is not None:
        est = c0 * b0 + c1 * s1_bound
    return StruveEval(kind, value, est, "lommel_connection")


def _anger_weber_integral(kind: str, nu: mpc, z: mpc) -> StruveEval:
    pi = mpmath.pi
    with mp.workprec(mp.prec + 20):
        if kind == "A":
            if not z.real > 0:
                raise ParameterError("integral route for A needs Re z > 0")
            top = mpmath.asinh(mp.prec * mpmath.log(2) / abs(z) + 10) + 2
            val, err = mpmath.quad(lambda t: mpmath.exp(-nu * t - z * mpmath.sinh(t)), [0, 1, top], error=True)
            return StruveEval(kind, val / pi, err / pi, "integral")
        # Anger J = 1/pi int cos(nu t - z sin t), Weber E = 1/pi int sin(nu t - z sin t)
        pts = mpmath.linspace(0, pi, 2 + int(abs(z)) + int(abs(nu)))
        if kind == "J_minus_J":
            val, err = mpmath.quad(lambda t: mpmath.cos(nu * t - z * mpmath.sin(t)), pts, error=True)
            value = val / pi - bessel.besselj(nu, z)
        else:
            val, err = mpmath.quad(lambda t: mpmath.sin(nu * t - z * mpmath.sin(t)), pts, error=True)
            value = val / pi + bessel.bessely(nu, z)
    return StruveEval(kind, +value, err / pi, "integral")
