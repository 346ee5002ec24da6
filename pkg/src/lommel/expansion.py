"""Evaluation of ``S_{mu,nu}(z)`` from its large-``z`` expansion.

Three strategies share the truncated series
``z^{mu-1} sum_{n<N} (-1)^n a_n(-mu, nu) z^{-2n}``:

``poincare``
    the truncated series alone, certified by the best applicable remainder bound;
``hyper``
    plus the re-expansion of the remainder in terminant functions;
``euler_tail``
    plus an Euler transform of the divergent tail.

``z`` may lie beyond the principal sector: pass ``arg`` to select the
branch (powers of ``z`` are continued along ``arg z = arg``).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import mpmath
from mpmath import mpc, mpf

from . import oracle
from .bounds import (
    BoundReport,
    bound_right_half,
    bound_rotated,
    even_M_euler_bound,
    hyper_bound,
)
from .coefficients import besselk_coeffs, converging_gamma, lommel_coeff, lommel_coeffs
from .errors import DegenerateBoundError, HypothesisViolation, ParameterError
from .numerics import Number, branch_power, current_precision, near_integer, rgamma, to_mpc, to_mpf
from .terminant import terminant

STRATEGIES = ("poincare", "hyper", "euler_tail", "oracle")


@dataclass(frozen=True)
class EvaluationResult:
    value: mpc
    strategy: str
    N: int
    M: int | None = None
    certified_bound: mpf | None = None
    bound_regime: str | None = None
    notes: tuple[str, ...] = field(default=())


def _polar(z: Number, arg: Number | None) -> tuple[mpf, mpf]:
    z = to_mpc(z)
    if z == 0:
        raise ParameterError("z must be non-zero")
    return abs(z), (mpmath.arg(z) if arg is None else to_mpf(arg))


def terminating_length(mu: Number, nu: Number) -> int | None:
    """Number of non-zero terms when ``mu - nu`` or ``mu + nu`` is a positive odd integer."""
    mu, nu = to_mpc(mu), to_mpc(nu)
    best = None
    for s in (mu - nu, mu + nu):
        if s.imag != 0:
            continue
        n = near_integer(s.real)
        if n is not None and n > 0 and n % 2 == 1:
            length = (n + 1) // 2
            best = length if best is None else min(best, length)
    return best


def optimal_N(z_abs: Number, rho: Number = 0) -> int:
    """``round(|z|/2 + rho)`` with ties to even, at least 1."""
    z_abs, rho = to_mpf(z_abs), to_mpf(rho)
    if z_abs < 2 * (1 - rho):
        raise ParameterError("optimal truncation needs |z| >= 2(1 - rho)")
    x = float(z_abs / 2 + rho)
    return max(1, round(x))


def partial_sum(mu: Number, nu: Number, z: Number, N: int, arg: Number | None = None) -> mpc:
    """``z^{mu-1} sum_{n<N} (-1)^n a_n(-mu, nu) z^{-2n}``; exact sum for terminating parameters."""
    mu, nu = to_mpc(mu), to_mpc(nu)
    if N < 0:
        raise ParameterError("N must be non-negative")
    r, theta = _polar(z, arg)
    length = terminating_length(mu, nu)
    count = N if length is None else min(N, length)
    inv2 = mpmath.expj(-2 * theta) / (r * r)
    total = mpc(0)
    coeff = mpc(1)
    power = mpc(1)
    for n in range(count):
        total += coeff * power
        coeff *= -((-mu + 2 * n + 1) ** 2 - nu**2)
        power *= inv2
    return branch_power(r, theta, mu - 1) * total


def remainder_prefactor(mu: Number, nu: Number) -> mpc:
    """``2^{mu+1} / (Gamma((nu - mu + 1)/2) Gamma((1 - mu - nu)/2))``."""
    mu, nu = to_mpc(mu), to_mpc(nu)
    return mpmath.power(2, mu + 1) * rgamma((nu - mu + 1) / 2) * rgamma((1 - mu - nu) / 2)


def hyper_terms(mu: Number, nu: Number, z: Number, N: int, M: int, arg: Number | None = None) -> mpc:
    """Re-expanded remainder before the prefactor: both terminant sums of order ``M``.

    ``R_N = remainder_prefactor * (hyper_terms + R_{N,M})``.
    """
    mu, nu = to_mpc(mu), to_mpc(nu)
    r, theta = _polar(z, arg)
    pi = mpmath.pi
    if not abs(theta) <= 3 * pi / 2:
        raise HypothesisViolation("|arg z| <= 3 pi/2")
    if M < 0:
        raise ParameterError("M must be non-negative")
    zc = r * mpmath.expj(theta)
    root = mpmath.sqrt(pi / 2) * branch_power(r, theta, mpf(-1) / 2)
    coeffs = besselk_coeffs(max(M - 1, 0), nu)
    inv = mpmath.expj(-theta) / r
    up = mpc(0)
    down = mpc(0)
    for m in range(M):
        p = 2 * N - m - mu + mpf(1) / 2
        t_up = terminant(p, 1j * zc, arg_w=theta + pi / 2).value
        t_down = terminant(p, -1j * zc, arg_w=theta - pi / 2).value
        up += coeffs[m] * (1j * inv) ** m * t_up
        down += coeffs[m] * (-1j * inv) ** m * t_down
    up *= pi * mpmath.expj(pi * mu / 2) * root * mpmath.expj(pi / 4) * mpmath.expj(zc)
    down *= pi * mpmath.expj(3 * pi * mu / 2) * root * mpmath.expj(-pi / 4) * mpmath.expj(-zc)
    return up + down


def euler_terms(mu: Number, nu: Number, z: Number, N: int, M: int, arg: Number | None = None) -> list[mpc]:
    """``v_{N,m}`` for ``m < M``: Euler-transformed groups of the tail after ``N`` terms."""
    mu, nu = to_mpc(mu), to_mpc(nu)
    r, theta = _polar(z, arg)
    coeffs = lommel_coeffs(N + M, -mu, nu)
    rot = mpmath.expj(-2 * theta)
    base = 1 + rot
    out = []
    for m in range(M):
        s = mpc(0)
        for k in range(m + 1):
            s += math.comb(m, k) * (-1) ** (N + k) * coeffs[N + k] * rot ** (m - k) / (r * mpmath.expj(theta)) ** (2 * N + 2 * k)
        out.append(s / base ** (m + 1))
    return out


def best_poincare_bound(mu: Number, nu: Number, z: Number, N: int) -> BoundReport | None:
    """Smallest applicable bound on ``|R_N|``, or ``None``."""
    reports: list[BoundReport] = []
    for fn in (bound_right_half, bound_rotated):
        try:
            reports.append(fn(mu, nu, z, N))
        except (HypothesisViolation, DegenerateBoundError):
            continue
        except ParameterError:
            continue
    if not reports:
        return None
    return min(reports, key=lambda rep: rep.bound)


def _default_N(z_abs: mpf, N: int | None, rho: Number) -> int:
    return optimal_N(z_abs, rho) if N is None else N


def poincare_eval(mu: Number, nu: Number, z: Number, N: int | None = None, rho: Number = 0, arg: Number | None = None) -> EvaluationResult:
    mu, nu = to_mpc(mu), to_mpc(nu)
    r, theta = _polar(z, arg)
    N = _default_N(r, N, rho)
    value = partial_sum(mu, nu, z, N, theta)
    length = terminating_length(mu, nu)
    if length is not None and N >= length:
        return EvaluationResult(value, "poincare", N, None, mpf(0), "terminating", ("series terminates",))
    report = None
    if arg is None or -mpmath.pi < theta <= mpmath.pi:
        report = best_poincare_bound(mu, nu, r * mpmath.expj(theta), N)
    return EvaluationResult(value, "poincare", N, None, report.bound if report else None, report.regime if report else None)


def hyper_eval(
    mu: Number,
    nu: Number,
    z: Number,
    M: int,
    N: int | None = None,
    rho: Number = mpf(1) / 2,
    arg: Number | None = None,
) -> EvaluationResult:
    """Truncated series plus ``M`` terminant-weighted terms of each exponential."""
    mu, nu = to_mpc(mu), to_mpc(nu)
    r, theta = _polar(z, arg)
    N = _default_N(r, N, rho)
    base = partial_sum(mu, nu, z, N, theta)
    length = terminating_length(mu, nu)
    if length is not None and N >= length:
        return EvaluationResult(base, "hyper", N, M, mpf(0), "terminating", ("series terminates",))
    pref = remainder_prefactor(mu, nu)
    value = base + pref * hyper_terms(mu, nu, z, N, M, theta)
    bound = None
    regime = None
    notes: list[str] = []
    if abs(theta) <= mpmath.pi / 2:
        try:
            rep = hyper_bound(mu, nu, z, N, M, theta)
            bound = abs(pref) * rep.bound
            regime = rep.regime
        except (HypothesisViolation, DegenerateBoundError) as exc:
            notes.append(str(exc))
    return EvaluationResult(value, "hyper", N, M, bound, regime, tuple(notes))


def euler_tail_eval(
    mu: Number,
    nu: Number,
    z: Number,
    M: int,
    N: int | None = None,
    rho: Number = 0,
    delta: Number | None = None,
) -> EvaluationResult:
    """Truncated series plus ``M`` Euler-transformed tail groups; ``|arg z| <= pi/2 - delta``.

    ``delta`` defaults to its minimum, ``1e-3``.
    """
    mu, nu = to_mpc(mu), to_mpc(nu)
    r, theta = _polar(z, None)
    delta = mpf("1e-3") if delta is None else to_mpf(delta)
    if delta < mpf("1e-3"):
        raise ParameterError("delta must be at least 1e-3")
    if not abs(theta) <= mpmath.pi / 2 - delta:
        raise HypothesisViolation("|arg z| <= pi/2 - delta")
    N = _default_N(r, N, rho)
    base = partial_sum(mu, nu, z, N)
    length = terminating_length(mu, nu)
    if length is not None and N >= length:
        return EvaluationResult(base, "euler_tail", N, M, mpf(0), "terminating", ("series terminates",))
    tail = sum(euler_terms(mu, nu, z, N, M), mpc(0))
    value = base + branch_power(r, theta, mu - 1) * tail
    bound = regime = None
    if M % 2 == 0:
        try:
            rep = even_M_euler_bound(mu, nu, z, N, M)
            bound, regime = rep.bound, rep.regime
        except (HypothesisViolation, DegenerateBoundError):
            pass
    return EvaluationResult(value, "euler_tail", N, M, bound, regime)


def lommel_S(
    mu: Number,
    nu: Number,
    z: Number,
    strategy: str = "hyper",
    N: int | None = None,
    M: int = 3,
    rho: Number | None = None,
    arg: Number | None = None,
) -> EvaluationResult:
    """Evaluate ``S_{mu,nu}(z)`` with the chosen strategy."""
    if strategy == "poincare":
        return poincare_eval(mu, nu, z, N, 0 if rho is None else rho, arg)
    if strategy == "hyper":
        return hyper_eval(mu, nu, z, M, N, mpf(1) / 2 if rho is None else rho, arg)
    if strategy == "euler_tail":
        if arg is not None:
            raise ParameterError("euler_tail works on the principal branch only")
        return euler_tail_eval(mu, nu, z, M, N, 0 if rho is None else rho)
    if strategy == "oracle":
        ref = oracle.lommel_S_reference(mu, nu, z, arg)
        return EvaluationResult(ref.value, "oracle", 0, None, ref.est_error, ref.method)
    raise ParameterError(f"unknown strategy {strategy!r}")


# -- converging factor -------------------------------------------------------------


@dataclass(frozen=True)
class ConvergingFactor:
    value: mpc
    series: mpc
    partial_series: tuple[mpc, ...]
    alpha: mpc
    zeta: mpf
    route: str


def converging_factor(mu: Number, nu: Number, z: Number, N: int, n_max: int = 4) -> ConvergingFactor:
    """``(-1)^N z^{2N - mu + 1} R_N / a_N(-mu, nu)`` and its expansion in ``1/N``.

    ``R_N`` comes from the reference route when ``|z| < 40`` and from the
    re-expansion with ``M = 5`` otherwise.  ``series`` sums
    ``gamma_n(alpha, zeta)/N^n`` for ``n <= n_max`` with
    ``alpha = 1/(1 + e^{2 i theta})`` and ``zeta = |z| - 2N``;
    ``partial_series[k]`` holds the sum up to ``n = k``.
    """
    mu, nu = to_mpc(mu), to_mpc(nu)
    if N < 1:
        raise ParameterError("N must be positive")
    r, theta = _polar(z, None)
    a_n = lommel_coeff(N, -mu, nu)
    if a_n == 0:
        raise ParameterError("a_N(-mu, nu) vanishes; the converging factor is undefined")
    if r < 40:
        rem = oracle.remainder_reference(mu, nu, z, N).value
        route = "oracle"
    else:
        rem = remainder_prefactor(mu, nu) * hyper_terms(mu, nu, z, N, 5)
        route = "hyper"
    value = (-1) ** N * branch_power(r, theta, 2 * N - mu + 1) * rem / a_n
    alpha = 1 / (1 + mpmath.expj(2 * theta))
    zeta = r - 2 * N
    values = {"a": alpha, "zeta": zeta, "mu": mu, "nu": nu}
    total = mpc(0)
    partial = []
    for n in range(n_max + 1):
        total += converging_gamma(n).evaluate(values) / mpf(N) ** n
        partial.append(total)
    return ConvergingFactor(+value, total, tuple(partial), alpha, zeta, route)


# -- Stokes scan -------------------------------------------------------------------

STOKES_HEADER = ("theta", "terminant_re", "terminant_im", "erf_model", "deviation", "emerging_term_abs")


@dataclass(frozen=True)
class StokesRow:
    theta: mpf
    terminant: mpc
    erf_model: mpf
    deviation: mpf
    emerging_term_abs: mpf


def stokes_scan(mu: Number, nu: Number, r: Number, thetas: Iterable[Number], rho: Number = 0) -> list[StokesRow]:
    """Leading terminant across the Stokes line ``arg z = pi/2`` against the erf model.

    For each ``theta`` the terminant ``T_p(i z)`` with ``p = 2N - mu + 1/2``
    and ``N = optimal_N(r, rho)`` is compared with
    ``1/2 + erf((theta - pi/2) sqrt(r/2))/2``; ``deviation`` is the distance
    of its real part from the model.
    """
    mu, nu = to_mpc(mu), to_mpc(nu)
    r = to_mpf(r)
    N = optimal_N(r, rho)
    p = 2 * N - mu + mpf(1) / 2
    pi = mpmath.pi
    pref = remainder_prefactor(mu, nu)
    rows = []
    for th in thetas:
        th = to_mpf(th)
        zc = r * mpmath.expj(th)
        t = terminant(p, 1j * zc, arg_w=th + pi / 2).value
        model = mpf(1) / 2 + mpmath.erf((th - pi / 2) * mpmath.sqrt(r / 2)) / 2
        lead = pi * mpmath.expj(pi * mu / 2) * mpmath.sqrt(pi / 2) * branch_power(r, th, mpf(-1) / 2) * mpmath.expj(zc)
        rows.append(StokesRow(th, t, model, abs(t.real - model), abs(pref * lead)))
    return rows


def stokes_csv(rows: Sequence[StokesRow], digits: int | None = None) -> str:
    """CSV with header ``STOKES_HEADER``; ``digits`` defaults to ``min(30, working digits)``."""
    if digits is None:
        digits = min(30, current_precision().working_digits)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(STOKES_HEADER)
    for row in rows:
        writer.writerow(
            [mpmath.nstr(x, digits) for x in (row.theta, row.terminant.real, row.terminant.imag, row.erf_model, row.deviation, row.emerging_term_abs)]
        )
    return buf.getvalue()
