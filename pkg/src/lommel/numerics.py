"""Arbitrary-precision scalar layer.

Values are plain :mod:`mpmath` ``mpf``/``mpc`` numbers.  The active
:class:`Precision` lives in a context variable; :func:`precision_scope`
installs one and sets the mpmath working precision to match.  Oracle code
raises the precision locally to ``oracle_bits``.
"""

from __future__ import annotations

import contextlib
import contextvars
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union

import mpmath
from mpmath import mp, mpc, mpf

from .errors import ParameterError, PoleError

Number = Union[int, float, complex, Fraction, str, mpf, mpc]

LOG2_10 = math.log2(10)


@dataclass(frozen=True)
class Precision:
    """Working and oracle precisions in bits."""

    working_bits: int = 256
    oracle_bits: int = 384

    def __post_init__(self) -> None:
        if self.working_bits < 53:
            raise ParameterError("working precision must be at least 53 bits")
        if self.oracle_bits < self.working_bits + 64:
            raise ParameterError("oracle precision must exceed working precision by 64 bits")

    @classmethod
    def from_digits(cls, digits: int) -> "Precision":
        """Precision giving ``digits`` decimal digits of working accuracy."""
        if not 30 <= digits <= 200:
            raise ParameterError(f"precision digits must lie in [30, 200], got {digits}")
        working = math.ceil(digits * LOG2_10) + 8
        return cls(working, working + 128)

    @property
    def working_digits(self) -> int:
        return int(self.working_bits / LOG2_10)

    @property
    def oracle_digits(self) -> int:
        return int(self.oracle_bits / LOG2_10)


DEFAULT_PRECISION = Precision()
_current: contextvars.ContextVar[Precision] = contextvars.ContextVar(
    "lommel_precision", default=DEFAULT_PRECISION
)
mp.prec = DEFAULT_PRECISION.working_bits


def current_precision() -> Precision:
    return _current.get()


@contextlib.contextmanager
def precision_scope(prec: Precision) -> Iterator[Precision]:
    """Install ``prec`` for the duration of the block."""
    token = _current.set(prec)
    try:
        with mp.workprec(prec.working_bits):
            yield prec
    finally:
        _current.reset(token)


@contextlib.contextmanager
def oracle_scope(extra_bits: int = 0) -> Iterator[int]:
    """Raise mpmath precision to the oracle precision plus ``extra_bits``."""
    bits = current_precision().oracle_bits + extra_bits
    with mp.workprec(max(bits, mp.prec)):
        yield bits


def to_mpc(x: Number) -> mpc:
    """Convert to ``mpc``; strings may be decimals, ``p/q`` or ``a+bi``."""
    if isinstance(x, mpc):
        return x
    if isinstance(x, Fraction):
        return mpc(mpf(x.numerator) / x.denominator)
    if isinstance(x, str):
        return parse_complex(x)
    return mpc(mpmath.mpmathify(x))


def to_mpf(x: Number) -> mpf:
    z = to_mpc(x)
    if z.imag != 0:
        raise ParameterError(f"expected a real number, got {x!r}")
    return z.real


def parse_real(text: str) -> mpf:
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return mpf(num.strip()) / mpf(den.strip())
    try:
        return mpf(text)
    except (ValueError, TypeError) as exc:
        raise ParameterError(f"cannot parse real number {text!r}") from exc


def parse_complex(text: str) -> mpc:
    """Parse ``"re"``, ``"re+im i"``, ``"re-im i"`` or ``"im i"``."""
    s = text.replace(" ", "").replace("j", "i")
    if not s:
        raise ParameterError("empty number")
    if not s.endswith("i"):
        return mpc(parse_real(s))
    body = s[:-1]
    # split at the last sign that is not an exponent sign or the leading sign
    cut = -1
    for k in range(len(body) - 1, 0, -1):
        if body[k] in "+-" and body[k - 1] not in "eE":
            cut = k
            break
    if cut == -1:
        re_part, im_part = "0", body
    else:
        re_part, im_part = body[:cut], body[cut:]
    if im_part in ("", "+"):
        im_part = "1"
    elif im_part == "-":
        im_part = "-1"
    return mpc(parse_real(re_part), parse_real(im_part))


def is_real(x: mpc) -> bool:
    return mpmath.im(x) == 0


def near_integer(x: mpf, tol_bits: int | None = None) -> int | None:
    """Nearest integer to ``x`` if within ``2**-tol_bits`` (relative to max(1,|x|))."""
    bits = (mp.prec - 16) if tol_bits is None else tol_bits
    n = int(mpmath.nint(x))
    if abs(x - n) <= mpf(2) ** (-bits) * max(1, abs(x)):
        return n
    return None


def polar(r: Number, theta: Number) -> mpc:
    return to_mpf(r) * mpmath.expj(to_mpf(theta))


def principal_power(z: Number, w: Number) -> mpc:
    """``z**w`` on the principal branch, ``-pi < arg z <= pi``."""
    z = to_mpc(z)
    if z == 0:
        raise ParameterError("principal power of zero")
    return mpmath.exp(to_mpc(w) * mpmath.log(z))


def branch_power(r: Number, theta: Number, w: Number) -> mpc:
    """``z**w`` for ``z = r e^{i theta}`` continued along ``arg z = theta``."""
    r = to_mpf(r)
    if r <= 0:
        raise ParameterError("branch power needs a positive modulus")
    return mpmath.exp(to_mpc(w) * mpc(mpmath.log(r), to_mpf(theta)))


def erf_c(z: Number) -> mpc:
    return mpc(mpmath.erf(to_mpc(z)))


def _stirling_threshold(bits: int) -> int:
    # The Stirling remainder at |w| is about exp(-2 pi |w|), so the shift
    # target grows with the precision.
    return max(20, math.ceil(bits * math.log(2) / (2 * math.pi)) + 3)


def complex_gamma(w: Number) -> mpc:
    """Gamma function by Stirling's series after upward recurrence.

    Reflection handles ``Re w < 1/2``; non-positive integers raise
    :class:`PoleError`.
    """
    w = to_mpc(w)
    if w.imag == 0:
        n = near_integer(w.real, mp.prec + 8)
        if n is not None and n <= 0 and w.real == n:
            raise PoleError(f"Gamma has a pole at {n}")
    with mp.workprec(mp.prec + 20):
        if w.real < 0.5:
            s = mpmath.sinpi(w)
            if s == 0:
                raise PoleError("Gamma has a pole here")
            return +(mpmath.pi / (s * complex_gamma(1 - w)))
        bits = mp.prec
        target = _stirling_threshold(bits)
        shift = max(0, math.ceil(target - float(w.real)))
        denom = mpc(1)
        for k in range(shift):
            denom *= w + k
        x = w + shift
        logg = (x - 0.5) * mpmath.log(x) - x + mpmath.log(2 * mpmath.pi) / 2
        eps = mpf(2) ** (-bits - 4)
        xinv2 = 1 / (x * x)
        xpow = 1 / x
        from .coefficients import bernoulli_number

        k = 1
        while True:
            b = bernoulli_number(2 * k)
            term = mpf(b.numerator) / b.denominator / (2 * k * (2 * k - 1)) * xpow
            logg += term
            if abs(term) < eps:
                break
            xpow *= xinv2
            k += 1
        return +(mpmath.exp(logg) / denom)


def real_gamma(x: Number) -> mpf:
    return complex_gamma(x).real


def rgamma(w: Number) -> mpc:
    """Reciprocal Gamma, zero at the poles."""
    try:
        return 1 / complex_gamma(w)
    except PoleError:
        return mpc(0)
