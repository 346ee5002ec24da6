"""Bessel functions J, Y, I, K at the ambient mpmath precision.

Thin wrapper over mpmath's implementations, which adapt their internal
precision to cancellation and handle integer orders natively.  Complex
order and argument are accepted because the reference Lommel evaluation
needs them; the rest of the package calls these with real arguments.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
from mpmath import mp, mpf

from .errors import ParameterError
from .numerics import Number, to_mpc

_KINDS = {
    "J": mpmath.besselj,
    "Y": mpmath.bessely,
    "I": mpmath.besseli,
    "K": mpmath.besselk,
}


@dataclass(frozen=True)
class BesselEval:
    value: mpmath.mpc
    est_error: mpf


def bessel(kind: str, nu: Number, x: Number) -> BesselEval:
    """Evaluate ``kind`` in ``{"J", "Y", "I", "K"}`` at order ``nu`` and argument ``x``."""
    try:
        fn = _KINDS[kind]
    except KeyError:
        raise ParameterError(f"unknown Bessel kind {kind!r}") from None
    nu_c, x_c = to_mpc(nu), to_mpc(x)
    if x_c == 0:
        raise ParameterError("Bessel argument must be non-zero")
    value = mpmath.mpc(fn(_simplify(nu_c), _simplify(x_c)))
    return BesselEval(value, abs(value) * mpf(2) ** (8 - mp.prec))


def _simplify(z: mpmath.mpc) -> mpmath.mpf | mpmath.mpc:
    # mpmath takes faster real code paths for real inputs
    return z.real if z.imag == 0 else z


def besselj(nu: Number, x: Number) -> mpmath.mpc:
    return bessel("J", nu, x).value


def bessely(nu: Number, x: Number) -> mpmath.mpc:
    return bessel("Y", nu, x).value


def besseli(nu: Number, x: Number) -> mpmath.mpc:
    return bessel("I", nu, x).value


def besselk(nu: Number, x: Number) -> mpmath.mpc:
    return bessel("K", nu, x).value
