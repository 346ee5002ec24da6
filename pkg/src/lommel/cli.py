"""Command-line front end: ``lommel {eval,bound,stokes-scan,coeffs,converge-factor,struve}``.

Numbers are printed as decimal strings at the working precision so JSON
output round-trips losslessly and is byte-identical across runs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Any, Sequence

import mpmath
from mpmath import mpc, mpf

from . import bounds, expansion, struve
from .coefficients import coefficient_family
from .errors import DegenerateBoundError, HypothesisViolation, LommelError, ParameterError
from .numerics import DEFAULT_PRECISION, Precision, parse_complex, parse_real, precision_scope

ENV_DIGITS = "LOMMEL_PRECISION_DIGITS"
COEFF_CAP = 40


def parse_angle_degrees(text: str) -> mpf:
    """Degrees (integer, decimal or ``p/q``) to radians as an exact multiple of pi."""
    try:
        frac = Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParameterError(f"cannot parse angle {text!r}") from exc
    return mpmath.pi * frac.numerator / (180 * frac.denominator)


def parse_z(text: str) -> tuple[mpc, mpf | None]:
    """``"r@deg"`` or ``"re+im i"``; returns ``z`` and the explicit branch (or ``None``)."""
    if "@" in text:
        r_text, deg_text = text.split("@", 1)
        r = parse_real(r_text)
        if r <= 0:
            raise ParameterError("modulus of z must be positive")
        theta = parse_angle_degrees(deg_text)
        z = r * mpmath.expj(theta)
        return z, (theta if not -mpmath.pi < theta <= mpmath.pi else None)
    z = parse_complex(text)
    if z == 0:
        raise ParameterError("z must be non-zero")
    return z, None


def _num(x: Any, digits: int) -> str | None:
    if x is None:
        return None
    return mpmath.nstr(mpf(x), digits, min_fixed=-5, max_fixed=digits)


def _emit_json(obj: dict[str, Any]) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, ensure_ascii=False) + "\n")


# -- commands ----------------------------------------------------------------------


def cmd_eval(args: argparse.Namespace, d: int) -> int:
    mu, nu = parse_complex(args.mu), parse_complex(args.nu)
    z, arg = parse_z(args.z)
    res = expansion.lommel_S(mu, nu, z, strategy=args.strategy, N=args.N, M=args.M, rho=args.rho, arg=arg)
    _emit_json(
        {
            "value_re": _num(res.value.real, d),
            "value_im": _num(res.value.imag, d),
            "certified_bound": _num(res.certified_bound, d),
            "bound_regime": res.bound_regime,
            "strategy": res.strategy,
            "N": res.N,
            "M": res.M,
            "precision_digits": d,
        }
    )
    return 0


def cmd_bound(args: argparse.Namespace, d: int) -> int:
    mu, nu = parse_complex(args.mu), parse_complex(args.nu)
    z, arg = parse_z(args.z)
    regime = args.regime
    if regime == "right_half":
        rep = bounds.bound_right_half(mu, nu, z, args.N)
    elif regime == "rotated":
        rep = bounds.bound_rotated(mu, nu, z, args.N)
    elif regime == "hyper":
        rep = bounds.hyper_bound(mu, nu, z, args.N, args.M, arg)
    elif regime == "even_M":
        rep = bounds.even_M_euler_bound(mu, nu, z, args.N, args.M)
    else:
        rep = expansion.best_poincare_bound(mu, nu, z, args.N)
        if rep is None:
            raise HypothesisViolation("no Poincare bound applies at this argument")
    _emit_json(
        {
            "bound": _num(rep.bound, d),
            "regime": rep.regime,
            "phi_star": _num(rep.phi, d),
            "ell": _num(rep.sector_factor, d),
            "limiting": rep.limiting,
        }
    )
    return 0


def cmd_stokes_scan(args: argparse.Namespace, d: int) -> int:
    if args.points < 2:
        raise ParameterError("need at least two scan points")
    lo, hi = parse_angle_degrees(args.theta_min), parse_angle_degrees(args.theta_max)
    if not 0 < lo < hi < mpmath.pi:
        raise ParameterError("scan grid must satisfy 0 < theta_min < theta_max < 180 degrees")
    r = parse_real(args.r)
    if r <= 0:
        raise ParameterError("r must be positive")
    thetas = [lo + (hi - lo) * k / (args.points - 1) for k in range(args.points)]
    rows = expansion.stokes_scan(parse_complex(args.mu), parse_complex(args.nu), r, thetas)
    sys.stdout.write(expansion.stokes_csv(rows, digits=args.csv_digits))
    return 0


def _fraction_text(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def cmd_coeffs(args: argparse.Namespace, d: int) -> int:
    if not 0 <= args.n <= COEFF_CAP:
        raise ParameterError(f"n must lie in [0, {COEFF_CAP}]")
    poly = coefficient_family(args.family, args.n)
    terms = [
        {"exponents": dict(zip(poly.variables, mono)), "coefficient": _fraction_text(c)}
        for mono, c in poly.sorted_terms()
    ]
    _emit_json({"family": args.family, "n": args.n, "variables": list(poly.variables), "polynomial": str(poly), "terms": terms})
    return 0


def cmd_converge_factor(args: argparse.Namespace, d: int) -> int:
    z, arg = parse_z(args.z)
    if arg is not None:
        raise ParameterError("converging factor needs the principal branch")
    cf = expansion.converging_factor(parse_complex(args.mu), parse_complex(args.nu), z, args.N, args.n_max)
    _emit_json(
        {
            "value_re": _num(cf.value.real, d),
            "value_im": _num(cf.value.imag, d),
            "series_re": _num(cf.series.real, d),
            "series_im": _num(cf.series.imag, d),
            "partial_series_re": [_num(s.real, d) for s in cf.partial_series],
            "alpha_re": _num(cf.alpha.real, d),
            "alpha_im": _num(cf.alpha.imag, d),
            "zeta": _num(cf.zeta, d),
            "N": args.N,
            "route": cf.route,
        }
    )
    return 0


def cmd_struve(args: argparse.Namespace, d: int) -> int:
    nu = parse_complex(args.nu)
    if args.kind == "M_large_order":
        if args.lam is None:
            raise ParameterError("--lam is required for M_large_order")
        res = struve.struve_M_large_order(nu, parse_real(args.lam), args.n_max, form=args.form)
    else:
        if args.z is None:
            raise ParameterError("--z is required")
        z, arg = parse_z(args.z)
        if arg is not None:
            raise ParameterError("Struve routes take z on the principal branch")
        if args.kind == "K":
            route = args.route or "lommel_connection"
            res = struve.struve_K(nu, z, route=route, strategy=args.strategy, M=args.M, N=args.N)
        elif args.kind == "M":
            route = args.route or "lommel_connection"
            res = struve.struve_M(nu, z, route=route, strategy=args.strategy, M=args.M, N=args.N)
        else:
            route = args.route or "lommel_connection"
            res = struve.anger_weber(args.kind, nu, z, route=route, strategy=args.strategy, M=args.M, N=args.N)
    _emit_json(
        {
            "kind": res.kind,
            "value_re": _num(res.value.real, d),
            "value_im": _num(res.value.imag, d),
            "est_error": _num(res.est_error, d),
            "route": res.route,
            "precision_digits": d,
        }
    )
    return 0


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lommel", description="Lommel function S_{mu,nu}(z) by asymptotic expansion with error bounds.")
    parser.add_argument("--digits", type=int, default=None, help=f"working precision in decimal digits (30..200); overrides ${ENV_DIGITS}")
    sub = parser.add_subparsers(dest="command", required=True)

    def params(p: argparse.ArgumentParser, z_required: bool = True) -> None:
        p.add_argument("--mu", default="0")
        p.add_argument("--nu", default="0")
        p.add_argument("--z", required=z_required, help='"r@degrees" or "re+im i"')

    p = sub.add_parser("eval", help="evaluate S_{mu,nu}(z)")
    params(p)
    p.add_argument("--strategy", choices=("poincare", "hyper", "euler_tail", "oracle"), default="hyper")
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--M", type=int, default=3)
    p.add_argument("--rho", type=parse_real, default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bound", help="error bound on a truncated expansion")
    params(p)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--M", type=int, default=0)
    p.add_argument("--regime", choices=("best", "right_half", "rotated", "hyper", "even_M"), default="best")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("stokes-scan", help="terminant versus erf model across the Stokes line (CSV)")
    p.add_argument("--mu", default="0")
    p.add_argument("--nu", default="0")
    p.add_argument("--r", required=True)
    p.add_argument("--theta-min", default="80")
    p.add_argument("--theta-max", default="100")
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--csv-digits", type=int, default=None)
    p.set_defaults(func=cmd_stokes_scan)

    p = sub.add_parser("coeffs", help="exact coefficient polynomials as JSON")
    p.add_argument("--family", required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("converge-factor", help="converging factor and its 1/N expansion")
    params(p)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--n-max", type=int, default=4)
    p.set_defaults(func=cmd_converge_factor)

    p = sub.add_parser("struve", help="Struve and Anger-Weber functions")
    p.add_argument("--kind", choices=("K", "M", "M_large_order") + struve.ANGER_WEBER_KINDS, required=True)
    p.add_argument("--nu", required=True)
    p.add_argument("--z", default=None)
    p.add_argument("--route", choices=("lommel_connection", "direct_series", "integral"), default=None)
    p.add_argument("--strategy", choices=("poincare", "hyper", "euler_tail", "oracle"), default="hyper")
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--M", type=int, default=3)
    p.add_argument("--lam", default=None)
    p.add_argument("--n-max", type=int, default=4)
    p.add_argument("--form", choices=("phi", "c"), default="phi")
    p.set_defaults(func=cmd_struve)
    return parser


def resolve_precision(digits: int | None) -> tuple[Precision, int]:
    """Working precision and the number of digits to print."""
    if digits is None:
        env = os.environ.get(ENV_DIGITS)
        if env is None:
            return DEFAULT_PRECISION, DEFAULT_PRECISION.working_digits
        try:
            digits = int(env)
        except ValueError as exc:
            raise ParameterError(f"{ENV_DIGITS} must be an integer, got {env!r}") from exc
    return Precision.from_digits(digits), digits


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        prec, digits = resolve_precision(args.digits)
        with precision_scope(prec):
            return args.func(args, digits)
    except HypothesisViolation as exc:
        sys.stderr.write(f"lommel: {exc}\n")
        return 3
    except DegenerateBoundError as exc:
        sys.stderr.write(f"lommel: bound refused: {exc}\n")
        return 3
    except ParameterError as exc:
        sys.stderr.write(f"lommel: invalid parameters: {exc}\n")
        return 2
    except LommelError as exc:
        sys.stderr.write(f"lommel: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
