"""Exact and high-precision coefficient families.

Symbolic families are returned as :class:`RationalPoly`, a small sparse
multivariate (Laurent) polynomial over the rationals.  Numeric families are
generic in the scalar type: ``Fraction`` inputs give exact results and
mpmath inputs give floating ones.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Any, Callable, Generic, Iterable, Mapping, TypeVar

import mpmath
from mpmath import mpc, mpf

from .errors import ParameterError, PoleError

Monomial = tuple[int, ...]
T = TypeVar("T")


class RationalPoly:
    """Sparse polynomial with ``Fraction`` coefficients.

    ``variables`` fixes the variable order; exponents may be negative, so
    Laurent polynomials such as the Struve coefficients fit as well.
    """

    __slots__ = ("variables", "terms")

    def __init__(self, variables: Iterable[str], terms: Mapping[Monomial, Any] | None = None) -> None:
        self.variables = tuple(variables)
        clean: dict[Monomial, Fraction] = {}
        for mono, c in (terms or {}).items():
            if len(mono) != len(self.variables):
                raise ValueError("monomial length does not match variables")
            c = Fraction(c)
            if c:
                clean[tuple(mono)] = c
        self.terms = clean

    @classmethod
    def constant(cls, variables: Iterable[str], c: Any) -> "RationalPoly":
        variables = tuple(variables)
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def variable(cls, variables: Iterable[str], name: str, power: int = 1) -> "RationalPoly":
        variables = tuple(variables)
        mono = tuple(power if v == name else 0 for v in variables)
        return cls(variables, {mono: 1})

    def _coerce(self, other: Any) -> "RationalPoly":
        if isinstance(other, RationalPoly):
            if other.variables != self.variables:
                raise ValueError("polynomials over different variables")
            return other
        if isinstance(other, (int, Fraction)):
            return RationalPoly.constant(self.variables, other)
        return NotImplemented

    def __add__(self, other: Any) -> "RationalPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for mono, c in other.terms.items():
            out[mono] = out.get(mono, 0) + c
        return RationalPoly(self.variables, out)

    __radd__ = __add__

    def __neg__(self) -> "RationalPoly":
        return RationalPoly(self.variables, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: Any) -> "RationalPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other: Any) -> "RationalPoly":
        return (-self) + other

    def __mul__(self, other: Any) -> "RationalPoly":
        if isinstance(other, (int, Fraction)):
            return RationalPoly(self.variables, {m: c * other for m, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = tuple(a + b for a, b in zip(m1, m2))
                out[mono] = out.get(mono, 0) + c1 * c2
        return RationalPoly(self.variables, out)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "RationalPoly":
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return NotImplemented

    def __pow__(self, n: int) -> "RationalPoly":
        if n < 0:
            raise ValueError("negative powers are not supported")
        out = RationalPoly.constant(self.variables, 1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = RationalPoly.constant(self.variables, other)
        if not isinstance(other, RationalPoly):
            return NotImplemented
        return self.variables == other.variables and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.variables, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def diff(self, name: str) -> "RationalPoly":
        i = self.variables.index(name)
        out: dict[Monomial, Fraction] = {}
        for mono, c in self.terms.items():
            e = mono[i]
            if e:
                m = list(mono)
                m[i] -= 1
                out[tuple(m)] = c * e
        return RationalPoly(self.variables, out)

    def degree(self, name: str) -> int:
        i = self.variables.index(name)
        return max((m[i] for m in self.terms), default=0)

    def coefficient(self, mono: Monomial) -> Fraction:
        return self.terms.get(tuple(mono), Fraction(0))

    def evaluate(self, values: Mapping[str, Any]) -> Any:
        """Evaluate at numeric values (``Fraction``, ``int`` or mpmath numbers)."""
        vals = [values[v] for v in self.variables]
        floating = any(isinstance(v, (mpf, mpc, float, complex)) for v in vals)
        total: Any = mpf(0) if floating else Fraction(0)
        for mono, c in self.terms.items():
            term: Any = (mpf(c.numerator) / c.denominator) if floating else c
            for v, e in zip(vals, mono):
                if e:
                    term = term * v**e
            total = total + term
        return total

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        return sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), tuple(-e for e in kv[0])))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts: list[str] = []
        for idx, (mono, c) in enumerate(self.sorted_terms()):
            factors = []
            for v, e in zip(self.variables, mono):
                if e == 1:
                    factors.append(v)
                elif e:
                    factors.append(f"{v}^{e}")
            mag = abs(c)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = f"{mag}*" + "*".join(factors)
            if idx == 0:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append((" - " if c < 0 else " + ") + body)
        return "".join(parts)

    def __repr__(self) -> str:
        return f"RationalPoly({self.variables!r}, {str(self)!r})"


class CoeffCache(Generic[T]):
    """Thread-safe prefix cache: entry ``n`` is built from entries ``0..n-1``."""

    def __init__(self, build_next: Callable[[list[T]], T]) -> None:
        self._build_next = build_next
        self._items: list[T] = []
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._items)

    def get(self, n: int) -> T:
        if n < 0:
            raise ParameterError("coefficient index must be non-negative")
        if n < len(self._items):
            return self._items[n]
        with self._lock:
            while len(self._items) <= n:
                self._items.append(self._build_next(list(self._items)))
            return self._items[n]


# -- Bernoulli numbers ------------------------------------------------------

_bernoulli: list[Fraction] = [Fraction(1)]
_bernoulli_lock = threading.Lock()


def bernoulli_number(n: int) -> Fraction:
    """Bernoulli number with ``B_1 = -1/2``."""
    if n < 0:
        raise ParameterError("Bernoulli index must be non-negative")
    if n < len(_bernoulli):
        return _bernoulli[n]
    with _bernoulli_lock:
        while len(_bernoulli) <= n:
            m = len(_bernoulli)
            if m > 1 and m % 2 == 1:
                _bernoulli.append(Fraction(0))
                continue
            s = sum(comb(m + 1, j) * _bernoulli[j] for j in range(m))
            _bernoulli.append(-s / (m + 1))
    return _bernoulli[n]


def _series_power(coeffs: list[Any], kappa: Any, order: int) -> list[Any]:
    """Coefficients of ``A(z)**kappa`` where ``A(0) = 1`` (Miller's recurrence)."""
    out = [coeffs[0] * 0 + 1]
    for n in range(1, order + 1):
        acc = 0
        for k in range(1, min(n, len(coeffs) - 1) + 1):
            acc = acc + (kappa * k - n + k) * coeffs[k] * out[n - k]
        out.append(acc * Fraction(1, n))
    return out


def _bernoulli_series(order: int) -> list[Fraction]:
    # z/(e^z - 1) = sum B_j z^j / j!
    return [bernoulli_number(j) / factorial(j) for j in range(order + 1)]


def gen_bernoulli(k: int, kappa: Any, lam: Any) -> Any:
    """Generalized Bernoulli polynomial ``B_k^(kappa)(lam)``.

    Defined by ``(z/(e^z-1))**kappa * exp(lam z) = sum B_k^(kappa)(lam) z^k/k!``.
    Exact for rational or :class:`RationalPoly` arguments.
    """
    if k < 0:
        raise ParameterError("index must be non-negative")
    if isinstance(kappa, (int, Fraction)) and isinstance(lam, (int, Fraction)):
        return _gen_bernoulli_exact(k, Fraction(kappa), Fraction(lam))
    power = _series_power(_bernoulli_series(k), kappa, k)
    total: Any = 0
    lam_pow: Any = 1
    for j in range(k + 1):
        total = total + power[k - j] * lam_pow * Fraction(1, factorial(j))
        lam_pow = lam_pow * lam
    return total * factorial(k)


@lru_cache(maxsize=4096)
def _gen_bernoulli_exact(k: int, kappa: Fraction, lam: Fraction) -> Fraction:
    power = _series_power(_bernoulli_series(k), kappa, k)
    total = sum((power[k - j] * lam**j / factorial(j) for j in range(k + 1)), Fraction(0))
    return total * factorial(k)


def norlund_poly(k: int) -> RationalPoly:
    """``B_k^(kappa)(lam)`` as a polynomial in ``kappa`` and ``lam``."""
    vars_ = ("kappa", "lam")
    out = gen_bernoulli(k, RationalPoly.variable(vars_, "kappa"), RationalPoly.variable(vars_, "lam"))
    return out if isinstance(out, RationalPoly) else RationalPoly.constant(vars_, out)


# -- Lommel and Bessel coefficients -----------------------------------------


def lommel_coeff(n: int, mu: Any, nu: Any) -> Any:
    """``prod_{k=1..n} ((mu + 2k - 1)**2 - nu**2)``."""
    if n < 0:
        raise ParameterError("index must be non-negative")
    out: Any = mu * 0 + 1
    for k in range(1, n + 1):
        out = out * ((mu + 2 * k - 1) ** 2 - nu**2)
    return out


def lommel_coeffs(n_max: int, mu: Any, nu: Any) -> list[Any]:
    """``[a_0, ..., a_{n_max}]`` built incrementally."""
    out: list[Any] = [mu * 0 + 1]
    for k in range(1, n_max + 1):
        out.append(out[-1] * ((mu + 2 * k - 1) ** 2 - nu**2))
    return out


def lommel_poly(n: int) -> RationalPoly:
    vars_ = ("mu", "nu")
    return lommel_coeff(n, RationalPoly.variable(vars_, "mu"), RationalPoly.variable(vars_, "nu"))


def besselk_coeff(m: int, nu: Any) -> Any:
    """Coefficient of ``z**-m`` in the large-``z`` expansion of ``K_nu``.

    ``(-1)^m (1/2 + nu)_m (1/2 - nu)_m / (2^m m!)``.
    """
    if m < 0:
        raise ParameterError("index must be non-negative")
    out: Any = nu * 0 + 1
    half = Fraction(1, 2)
    for k in range(m):
        out = out * (half + nu + k) * (half - nu + k) * Fraction(-1, 2 * (k + 1))
    return out


def besselk_coeffs(m_max: int, nu: Any) -> list[Any]:
    out: list[Any] = [nu * 0 + 1]
    half = Fraction(1, 2)
    for k in range(m_max):
        out.append(out[-1] * (half + nu + k) * (half - nu + k) * Fraction(-1, 2 * (k + 1)))
    return out


def besselk_poly(m: int) -> RationalPoly:
    return besselk_coeff(m, RationalPoly.variable(("nu",), "nu"))


def phi_coeff(n: int, nu: Any) -> Any:
    """``Gamma(nu + 1/2) / (nu^(2n) Gamma(nu - n + 1/2))`` in its polynomial form.

    Evaluated as ``nu^-n sum_k C(n,k) B_k^(n+1)(1/2) nu^-k``, which is exact
    for rational ``nu``.
    """
    if n < 0:
        raise ParameterError("index must be non-negative")
    if nu == 0:
        raise PoleError("phi coefficient is singular at nu = 0")
    twice = 2 * nu + 1
    if _is_nonpositive_even_integer(twice):
        raise PoleError("Gamma(nu + 1/2) has a pole")
    half = Fraction(1, 2)
    total: Any = 0
    inv = 1 / nu if isinstance(nu, (mpf, mpc)) else Fraction(1) / Fraction(nu)
    inv_pow: Any = 1
    for k in range(n + 1):
        b = _gen_bernoulli_exact(k, Fraction(n + 1), half)
        c = comb(n, k) * b
        coef = (mpf(c.numerator) / c.denominator) if isinstance(nu, (mpf, mpc)) else c
        total = total + coef * inv_pow
        inv_pow = inv_pow * inv
    return total * inv**n


def _is_nonpositive_even_integer(x: Any) -> bool:
    # 2 nu + 1 in {0, -2, -4, ...}  <=>  nu + 1/2 in {0, -1, -2, ...}
    if isinstance(x, (mpf, mpc)):
        x = mpmath.mpc(x)
        if x.imag != 0:
            return False
        x = x.real
        if x != mpmath.floor(x):
            return False
        n = int(x)
    else:
        x = Fraction(x)
        if x.denominator != 1:
            return False
        n = int(x)
    return n <= 0 and n % 2 == 0


@lru_cache(maxsize=256)
def struve_c(n: int) -> RationalPoly:
    """Coefficient ``c_n`` of the large-order Struve expansion, a Laurent polynomial in ``l``.

    ``c_n(l) = sum_{k=ceil(n/2)}^{n} C(2k, n) B_{n-k}^(k+1)(1/2) / (n-k)! * l^(-2k)``.
    """
    if n < 0:
        raise ParameterError("index must be non-negative")
    terms: dict[Monomial, Fraction] = {}
    half = Fraction(1, 2)
    for k in range((n + 1) // 2, n + 1):
        c = comb(2 * k, n) * _gen_bernoulli_exact(n - k, Fraction(k + 1), half) / factorial(n - k)
        if c:
            terms[(-2 * k,)] = c
    return RationalPoly(("l",), terms)


# -- converging-factor coefficients ------------------------------------------

GAMMA_VARS = ("a", "zeta", "mu", "nu")


def _gv(name: str) -> RationalPoly:
    return RationalPoly.variable(GAMMA_VARS, name)


def _d(p: RationalPoly, k: int = 1) -> RationalPoly:
    for _ in range(k):
        p = p.diff("zeta")
    return p


def _op_leading(g: RationalPoly) -> RationalPoly:
    a = _gv("a")
    return 4 * (a * _d(g, 2) - 2 * a * _d(g) + g)


def _op_middle(g: RationalPoly) -> RationalPoly:
    a, z, mu = _gv("a"), _gv("zeta"), _gv("mu")
    return 4 * a * z * _d(g, 2) + a * (4 * mu - 2 - 4 * z) * _d(g) + (4 * a * (1 - mu) + 4 * (1 - a) * z) * g


def _op_trailing(g: RationalPoly) -> RationalPoly:
    a, z, mu, nu = _gv("a"), _gv("zeta"), _gv("mu"), _gv("nu")
    return (
        a * z * z * _d(g, 2)
        + a * z * (2 * mu - 1) * _d(g)
        + (a * ((mu - 1) ** 2 - nu * nu) + (1 - a) * z * z) * g
    )


def _solve_leading(f: RationalPoly) -> RationalPoly:
    # Invert 4(1 - 2aD + aD^2) on polynomials in zeta by the terminating
    # Neumann series sum_j (2aD - aD^2)^j / 4.
    a = _gv("a")
    term = f
    out = f
    while not term.is_zero():
        term = 2 * a * _d(term) - a * _d(term, 2)
        out = out + term
    return out / 4


def _gamma_next(prev: list[RationalPoly]) -> RationalPoly:
    n = len(prev)
    a, z = _gv("a"), _gv("zeta")
    rhs = {0: 4 * (1 - a), 1: 4 * z * (1 - a), 2: z * z * (1 - a)}.get(n, RationalPoly.constant(GAMMA_VARS, 0))
    if n >= 1:
        rhs = rhs - _op_middle(prev[n - 1])
    if n >= 2:
        rhs = rhs - _op_trailing(prev[n - 2])
    return _solve_leading(rhs)


_gamma_cache: CoeffCache[RationalPoly] = CoeffCache(_gamma_next)


def converging_gamma(n: int) -> RationalPoly:
    """Polynomial ``gamma_n(a, zeta; mu, nu)`` of the converging-factor expansion.

    ``a`` stands for ``1/(1 + e^{2i theta})`` and ``zeta`` for ``|z| - 2N``.
    """
    return _gamma_cache.get(n)


def converging_residual(n: int) -> RationalPoly:
    """Residual of the order-``n`` recurrence with the cached solutions substituted."""
    gammas = [converging_gamma(k) for k in range(n + 1)]
    a, z = _gv("a"), _gv("zeta")
    rhs = {0: 4 * (1 - a), 1: 4 * z * (1 - a), 2: z * z * (1 - a)}.get(n, RationalPoly.constant(GAMMA_VARS, 0))
    lhs = _op_leading(gammas[n])
    if n >= 1:
        lhs = lhs + _op_middle(gammas[n - 1])
    if n >= 2:
        lhs = lhs + _op_trailing(gammas[n - 2])
    return lhs - rhs


def coefficient_family(family: str, n: int) -> RationalPoly:
    """Symbolic coefficient by family name (used by the CLI)."""
    if family == "lommel":
        return lommel_poly(n)
    if family == "besselk":
        return besselk_poly(n)
    if family == "struve_c":
        return struve_c(n)
    if family == "gamma_cf":
        return converging_gamma(n)
    if family == "bernoulli":
        return norlund_poly(n)
    raise ParameterError(f"unknown coefficient family {family!r}")
