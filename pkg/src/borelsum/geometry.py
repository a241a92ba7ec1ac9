"""Geometry of the unfolding: the time coordinate t(x, eps) of the vector
field -(x^2 - eps) d/dx, its inverse, sheet bookkeeping, and membership
tests for the x-plane strips, the Borel-plane strips Omega_alpha, the
solution domain Z, and the parameter sector S.

Conventions: eps = s^2, principal logarithm with branch cut along the
segment [-s, s] in the x-plane; sheet k adds k*pi*i/s to t.  At s = 0
everything degenerates to the classical t = 1/x picture.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError

MARGIN = 1e-9  # default strictness margin for membership tests


@dataclass(frozen=True)
class SqrtEps:
    """The unfolding parameter, carried as its square root s (may be 0)."""

    s: complex

    def __post_init__(self):
        object.__setattr__(self, "s", complex(self.s))

    @property
    def eps(self) -> complex:
        return self.s * self.s

    @property
    def is_zero(self) -> bool:
        return self.s == 0


@dataclass(frozen=True)
class DirectionRange:
    """Admissible-direction data: directions are confined to (beta1, beta2),
    kept eta away from arg(s) mod pi, with |s| < rho."""

    beta1: float
    beta2: float
    eta: float
    rho: float

    def __post_init__(self):
        if not self.beta1 < self.beta2:
            raise ConfigError("need beta1 < beta2")
        if not 0 < self.eta < (self.beta2 - self.beta1) / 2 <= math.pi / 2:
            raise ConfigError("need 0 < eta < (beta2-beta1)/2 <= pi/2")
        if self.rho <= 0:
            raise ConfigError("need rho > 0")


@dataclass(frozen=True)
class SheetPoint:
    """A point of the x-plane together with the branch index of t."""

    x: complex
    sheet: int = 0

    def __post_init__(self):
        object.__setattr__(self, "x", complex(self.x))


def _as_sheet_point(p) -> SheetPoint:
    if isinstance(p, SheetPoint):
        return p
    return SheetPoint(complex(p), 0)


# ---------------------------------------------------------------------------
# time coordinate


def _on_cut(x: complex, s: complex, tol: float = 1e-14) -> bool:
    """Is x on the branch segment [-s, s] (within tol, relative to |s|)?"""
    if s == 0:
        return x == 0
    r = x / s  # segment becomes [-1, 1]
    return abs(r.imag) <= tol and -1 - tol <= r.real <= 1 + tol


def time_coord(p, s: SqrtEps) -> complex:
    """t(x, eps): 1/x at s=0, else -(1/2s) Log((x-s)/(x+s)) + k*pi*i/s."""
    p = _as_sheet_point(p)
    x, k = p.x, p.sheet
    sv = s.s
    if sv == 0:
        if x == 0:
            raise DomainError("time coordinate undefined at x=0 (on cut)")
        return 1.0 / x
    if _on_cut(x, sv):
        raise DomainError("x on cut [-sqrt(eps), sqrt(eps)]")
    t = -cmath.log((x - sv) / (x + sv)) / (2.0 * sv)
    return t + k * (cmath.pi * 1j) / sv


def inverse_time(t: complex, s: SqrtEps) -> SheetPoint:
    """Invert the time coordinate; recovers the sheet from the branch of
    the log.  x = s (1 + e^{-2st}) / (1 - e^{-2st}) for s != 0, x = 1/t
    at s = 0."""
    sv = s.s
    if sv == 0:
        if t == 0:
            raise DomainError("t=0 corresponds to x=infinity")
        return SheetPoint(1.0 / t, 0)
    q = -2.0 * sv * t
    # poles of x(t): e^{-2st} = 1, i.e. t in (pi i/s) Z
    e = cmath.exp(q)
    if abs(e - 1.0) < 1e-13 * max(1.0, abs(e)):
        raise DomainError("t at a pole of the inverse time map")
    x = sv * (1.0 + e) / (1.0 - e)
    # sheet: t = t_principal + k*pi*i/s
    t_prin = -cmath.log((x - sv) / (x + sv)) / (2.0 * sv)
    k = int(round(((t - t_prin) * sv / (1j * math.pi)).real))
    return SheetPoint(x, k)


# ---------------------------------------------------------------------------
# admissible directions and sector membership


def sector_contains(s: SqrtEps, dr: DirectionRange) -> bool:
    """Membership of s in the parameter sector: |s| < rho and arg(s) in
    (beta1 - pi + eta, beta2 - eta); s = 0 belongs by convention."""
    if s.is_zero:
        return True
    if abs(s.s) >= dr.rho:
        return False
    a = cmath.phase(s.s)
    lo, hi = dr.beta1 - math.pi + dr.eta, dr.beta2 - dr.eta
    # compare modulo 2 pi
    for shift in (-2 * math.pi, 0.0, 2 * math.pi):
        if lo < a + shift < hi:
            return True
    return False


def admissible_alphas(s: SqrtEps, dr: DirectionRange) -> tuple:
    """Open interval of admissible directions alpha; may be empty
    (returned as (lo, hi) with lo >= hi)."""
    if not sector_contains(s, dr):
        raise DomainError("sqrt(eps) outside the parameter sector")
    if s.is_zero:
        return (dr.beta1, dr.beta2)
    a = cmath.phase(s.s)
    # bring arg(s) to the branch that makes the constraint interval overlap
    # (beta1, beta2): the sector test above guarantees one such branch
    best = (dr.beta2, dr.beta2)  # empty fallback
    for shift in (-2 * math.pi, 0.0, 2 * math.pi):
        av = a + shift
        lo = max(av + dr.eta, dr.beta1)
        hi = min(dr.beta2, av + math.pi - dr.eta)
        if hi - lo > best[1] - best[0]:
            best = (lo, hi)
    return best


# ---------------------------------------------------------------------------
# strips in the x plane (via t) and domains


def strip_width(alpha: float, s: SqrtEps) -> float:
    """Width bound W = -Re(e^{i alpha} pi i / s) of the side-+ t-strip."""
    return -(cmath.exp(1j * alpha) * math.pi * 1j / s.s).real


def x_strip_contains(p, side: str, alpha: float, lam: float, s: SqrtEps,
                     margin: float = MARGIN) -> bool:
    """Two-sided strip test Lambda < Re(e^{i alpha} t) < W - Lambda for
    side '+', mirrored for side '-'.  At s=0 the + condition is
    Re(e^{i alpha} t) > Lambda (a disc in the x plane)."""
    if side not in ("+", "-"):
        raise ConfigError("side must be '+' or '-'")
    if lam < 0:
        raise DomainError("Lambda must be >= 0")
    p = _as_sheet_point(p)
    try:
        t = time_coord(p, s)
    except DomainError:
        return False
    r = (cmath.exp(1j * alpha) * t).real
    if s.is_zero:
        return r > lam + margin if side == "+" else r < -lam - margin
    w = strip_width(alpha, s)
    if not 2 * lam < w:
        raise DomainError("strip is empty: 2*Lambda >= width")
    if side == "+":
        return lam + margin < r < w - lam - margin
    return -w + lam + margin < r < -lam - margin


def _alpha_samples(s: SqrtEps, dr: DirectionRange, n: int = 181):
    lo, hi = admissible_alphas(s, dr)
    if hi <= lo:
        return np.empty(0)
    pad = 1e-6 * (hi - lo)
    return np.linspace(lo + pad, hi - pad, n)


def omega_contains(xi: complex, s: SqrtEps, dr: DirectionRange,
                   margin: float = MARGIN) -> bool:
    """Is xi in Omega_alpha(s) = union of lines c + e^{i alpha} R over
    |c| <= (3/2)|s| along s, for some admissible alpha?"""
    if s.is_zero:
        return admissible_alphas(s, dr)[1] > admissible_alphas(s, dr)[0]
    for alpha in _alpha_samples(s, dr):
        if dist_to_strip(xi, alpha, s) <= margin:
            return True
    return False


def dist_to_strip(xi: complex, alpha: float, s: SqrtEps, half_span: float = 1.5) -> float:
    """Distance from xi to the strip swept by c + e^{i alpha} R,
    c in [-half_span*s, half_span*s]: decompose xi = kappa*s + e^{i alpha} u
    with kappa, u real and measure the transverse excess."""
    sv = s.s
    ea = cmath.exp(1j * alpha)
    det = sv.real * ea.imag - sv.imag * ea.real  # Im(conj(s) e^{i alpha}) pattern
    if abs(det) < 1e-15:
        # line direction parallel to s: strip degenerates to one line family
        return abs((xi / ea).imag) * 0 + (0.0 if abs((xi * ea.conjugate()).imag) < 1e-15 else math.inf)
    kappa = (xi.real * ea.imag - xi.imag * ea.real) / det
    excess = max(0.0, abs(kappa) - half_span)
    # transverse unit displacement corresponds to |Im(e^{-i alpha} s)| in xi
    return excess * abs((sv / ea).imag)


def z_contains(p, s: SqrtEps, lam: float, dr: DirectionRange,
               margin: float = MARGIN) -> bool:
    """Is x in the solution domain: some admissible alpha and side whose
    t-strip contains t(x, eps)?"""
    for alpha in _alpha_samples(s, dr):
        for side in ("+", "-"):
            try:
                if x_strip_contains(p, side, float(alpha), lam, s, margin=margin):
                    return True
            except DomainError:
                continue
    return False


def best_strip(p, s: SqrtEps, lam: float, dr: DirectionRange, n_alpha: int = 181):
    """Return (alpha, side, margin) maximizing the distance of
    Re(e^{i alpha} t) to the strip boundary; raises if x is outside Z."""
    p = _as_sheet_point(p)
    t = time_coord(p, s)
    best = None
    alphas = _alpha_samples(s, dr)
    for alpha in alphas:
        r = (cmath.exp(1j * float(alpha)) * t).real
        if s.is_zero:
            for side, rr in (("+", r), ("-", -r)):
                mg = rr - lam
                if best is None or mg > best[2]:
                    best = (float(alpha), side, mg)
        else:
            w = strip_width(float(alpha), s)
            if w <= 2 * lam:
                continue
            for side, rr in (("+", r), ("-", -r)):
                mg = min(rr - lam, w - lam - rr)
                if best is None or mg > best[2]:
                    best = (float(alpha), side, mg)
    if best is None or best[2] <= 0:
        raise DomainError("x outside Z(sqrt(eps))")
    return best


def path_gamma(side: str, alpha: float, s: SqrtEps, C: float, T: float, n: int):
    """Sample the vertical line Re(e^{i alpha} t) = C (side-signed) as
    points in the x plane: t_j = (C + i u_j) e^{-i alpha}, u_j uniform
    in [-T, T], mapped through inverse_time."""
    if side not in ("+", "-"):
        raise ConfigError("side must be '+' or '-'")
    sgn = 1.0 if side == "+" else -1.0
    Cv = sgn * abs(C)
    if not s.is_zero:
        w = strip_width(alpha, s)
        if not 0 < abs(C) < w:
            raise DomainError("C outside the t-strip")
    else:
        if C == 0:
            raise DomainError("C must be nonzero at s=0")
    u = np.linspace(-T, T, n)
    ts = (Cv + 1j * u) * cmath.exp(-1j * alpha)
    return [inverse_time(complex(t), s) for t in ts]


__all__ = [
    "SqrtEps", "DirectionRange", "SheetPoint", "time_coord", "inverse_time",
    "admissible_alphas", "sector_contains", "x_strip_contains",
    "omega_contains", "z_contains", "path_gamma", "strip_width",
    "dist_to_strip", "best_strip",
]
