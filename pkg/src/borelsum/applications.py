"""End-to-end synthesis on top of the Borel-plane solver.

Evaluation of the bounded (center-manifold-type) solution in the x plane,
confluence studies of the eps -> 0 limit, ODE residual certification,
and the diagonalization of linear systems A = Lambda + (x^2-eps) R via a
Riccati reduction to the nonlinear system solved by the fixed point.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError
from .geometry import (SqrtEps, SheetPoint, _as_sheet_point, strip_width,
                       time_coord)
from .polyops import poly_eval, poly2_eval
from .series import SystemSpec
from .solver import OmegaSolution, solve_fixed_point
from .transforms import laplace_unfolded


# ---------------------------------------------------------------------------
# evaluation of the solution in the x plane


def strip_margin(sol: OmegaSolution, x) -> float:
    """Distance of t(x) to the boundary of the t-strip of this solution
    (negative when outside)."""
    p = _as_sheet_point(x)
    try:
        t = time_coord(p, sol.s)
    except DomainError:
        return -math.inf
    r = (cmath.exp(1j * sol.alpha) * t).real
    lam = sol.grid.lam
    if sol.s.is_zero:
        return r - lam if sol.side == "+" else -r - lam
    W = strip_width(sol.alpha, sol.s)
    if sol.side == "+":
        return min(r - lam, W - lam - r)
    return min(-r - lam, W - lam + r)


def center_manifold_eval(sols, x, offset: float = 0.0) -> np.ndarray:
    """Value y(x) = L[y~](x) of the bounded solution, selecting among the
    provided OmegaSolutions the direction/side whose t-strip contains
    t(x) with maximal margin."""
    if isinstance(sols, OmegaSolution):
        sols = [sols]
    best, best_m = None, 0.0
    for sol in sols:
        mg = strip_margin(sol, x)
        if mg > best_m:
            best, best_m = sol, mg
    if best is None:
        raise DomainError("x outside Z(sqrt(eps)) for the available "
                          "directions")
    line = best.strip.line(offset) if not best.s.is_zero else best.strip.central
    p = _as_sheet_point(x)
    val = laplace_unfolded(line, p, best.s)
    return np.atleast_1d(np.asarray(val))


def ode_residual(spec: SystemSpec, y_eval, x, s: SqrtEps, h: float,
                 direction: float | None = None) -> float:
    """|(x^2-eps) y' - M(eps) y - f(x, y)| with a central-difference
    derivative, Richardson-extrapolated from steps h and h/2."""
    p = _as_sheet_point(x)
    xv = p.x
    th = 0.0 if direction is None else direction
    e = cmath.exp(1j * th)

    def deriv(step):
        return (np.asarray(y_eval(xv + step * e))
                - np.asarray(y_eval(xv - step * e))) / (2 * step * e)

    d1 = deriv(h)
    d2 = deriv(h / 2)
    dy = (4.0 * d2 - d1) / 3.0
    y = np.atleast_1d(np.asarray(y_eval(xv)))
    eps = s.eps
    res = (xv * xv - eps) * dy - spec.M_at(eps) @ y - spec.f_eval(xv, y, eps)
    return float(np.max(np.abs(res)))


# ---------------------------------------------------------------------------
# confluence


def confluence_table(spec: SystemSpec, s0: complex, nu_list, x_list,
                     alpha: float, lam: float, side: str = "+",
                     half_width: float | None = None, n: int = 1025,
                     tol: float = 1e-11, csv_path: str | None = None):
    """Rows (nu, x, |y(x, nu*s0) - y(x, 0)|) comparing the unfolded
    solution against the classical (s=0) one-sided pipeline.

    Points of x_list outside the domain of either end are marked skipped.
    """
    sol0 = solve_fixed_point(spec, SqrtEps(0.0), alpha, "+", lam,
                             half_width=half_width, n=n, tol=tol)
    y0 = {}
    for x in x_list:
        try:
            y0[x] = center_manifold_eval([sol0], x)
        except DomainError:
            y0[x] = None
    rows = []
    for nu in nu_list:
        s = SqrtEps(nu * s0)
        if nu == 0:
            for x in x_list:
                rows.append((0.0, complex(x), 0.0, False))
            continue
        sol = solve_fixed_point(spec, s, alpha, side, lam,
                                half_width=half_width, n=n, tol=tol)
        for x in x_list:
            if y0[x] is None:
                rows.append((float(nu), complex(x), math.nan, True))
                continue
            try:
                y = center_manifold_eval([sol], x)
            except DomainError:
                rows.append((float(nu), complex(x), math.nan, True))
                continue
            rows.append((float(nu), complex(x),
                         float(np.max(np.abs(y - y0[x]))), False))
    if csv_path is not None:
        with open(csv_path, "w") as f:
            f.write("nu,re_x,im_x,abs_diff,skipped\n")
            for nu, x, d, sk in rows:
                f.write(f"{nu:.16e},{x.real:.16e},{x.imag:.16e},"
                        f"{d:.16e},{int(sk)}\n")
    return rows


# ---------------------------------------------------------------------------
# linear systems: Riccati reduction and normalization


@dataclass(frozen=True)
class LinearSystemSpec:
    """(x^2-eps) y' = A(x, eps) y with A = Lambda + (x^2-eps) R,
    Lambda = Diag(lam0_i(eps) + x lam1_i(eps)).

    lam0, lam1: per-index 1-D eps-coefficient arrays; R: n x n nested
    sequence of (d_x+1, d_eps+1) coefficient arrays in (x, eps).
    """

    n: int
    lam0: tuple
    lam1: tuple
    R: tuple
    sep_floor: float = 1e-10

    def __post_init__(self):
        n = self.n
        object.__setattr__(self, "lam0", tuple(
            np.atleast_1d(np.asarray(v, dtype=complex)) for v in self.lam0))
        object.__setattr__(self, "lam1", tuple(
            np.atleast_1d(np.asarray(v, dtype=complex)) for v in self.lam1))
        R = []
        for row in self.R:
            R.append(tuple(np.atleast_2d(np.asarray(v, dtype=complex))
                           for v in row))
        object.__setattr__(self, "R", tuple(R))
        if len(self.lam0) != n or len(self.lam1) != n or len(self.R) != n:
            raise ConfigError("dimension mismatch in LinearSystemSpec")
        vals = [poly_eval(v, 0.0) for v in self.lam0]
        for i in range(n):
            for j in range(i + 1, n):
                if abs(vals[i] - vals[j]) < self.sep_floor:
                    raise ConfigError("leading eigenvalues coalesce at eps=0")

    def Lambda_at(self, x: complex, eps: complex) -> np.ndarray:
        d = [poly_eval(self.lam0[i], eps) + x * poly_eval(self.lam1[i], eps)
             for i in range(self.n)]
        return np.diag(np.array(d, dtype=complex))

    def R_at(self, x: complex, eps: complex) -> np.ndarray:
        return np.array([[poly2_eval(self.R[i][j], x, eps)
                          for j in range(self.n)] for i in range(self.n)],
                        dtype=complex)

    def pairs(self):
        """Lexicographic off-diagonal index pairs (i, j), i != j."""
        return [(i, j) for i in range(self.n) for j in range(self.n) if i != j]


def riccati_reduce(lin: LinearSystemSpec) -> SystemSpec:
    """The m = n(n-1) system for the off-diagonal entries u_ij of the
    shearing transformation y = (I + U) z:

        (x^2-eps) u_ij' = (lam0_i - lam0_j) u_ij + x (lam1_i - lam1_j) u_ij
            + (x^2-eps) [ r_ij + sum_{k != i,j} r_ik u_kj
                          + (r_ii - r_jj) u_ij - r_ji u_ij^2
                          - sum_{k != i,j} r_jk u_ij u_kj ].
    """
    n = lin.n
    pairs = lin.pairs()
    m = len(pairs)
    idx = {p: q for q, p in enumerate(pairs)}

    def unit(q):
        l = [0] * m
        l[q] = 1
        return tuple(l)

    de = max(max(len(v) for v in lin.lam0), max(len(v) for v in lin.lam1))
    M_coeffs = [np.zeros((m, m), dtype=complex) for _ in range(de)]
    a_terms: dict = {}
    g_terms: dict = {}
    dx = max(r.shape[0] for row in lin.R for r in row)
    dge = max(r.shape[1] for row in lin.R for r in row)

    def g_add(l: tuple, comp: int, coeff: np.ndarray, sign: float):
        if l not in g_terms:
            g_terms[l] = np.zeros((dx, dge, m), dtype=complex)
        g_terms[l][: coeff.shape[0], : coeff.shape[1], comp] += sign * coeff

    for q, (i, j) in enumerate(pairs):
        d0 = np.zeros(de, dtype=complex)
        d0[: len(lin.lam0[i])] += lin.lam0[i]
        d0[: len(lin.lam0[j])] -= lin.lam0[j]
        for r in range(de):
            M_coeffs[r][q, q] = d0[r]
        d1 = np.zeros(de, dtype=complex)
        d1[: len(lin.lam1[i])] += lin.lam1[i]
        d1[: len(lin.lam1[j])] -= lin.lam1[j]
        if np.any(d1):
            l = unit(q)
            if l not in a_terms:
                a_terms[l] = np.zeros((de, m), dtype=complex)
            a_terms[l][:, q] += d1
        # g-terms
        g_add((0,) * m, q, lin.R[i][j], +1.0)                    # r_ij
        for k in range(n):
            if k in (i, j):
                continue
            g_add(unit(idx[(k, j)]), q, lin.R[i][k], +1.0)       # r_ik u_kj
        g_add(unit(q), q, lin.R[i][i], +1.0)                     # r_ii u_ij
        g_add(unit(q), q, lin.R[j][j], -1.0)                     # -u_ij r_jj
        l2 = [0] * m
        l2[q] = 2
        g_add(tuple(l2), q, lin.R[j][i], -1.0)                   # -r_ji u_ij^2
        for k in range(n):
            if k in (i, j):
                continue
            l3 = [0] * m
            l3[q] += 1
            l3[idx[(k, j)]] += 1
            g_add(tuple(l3), q, lin.R[j][k], -1.0)               # -r_jk u_ij u_kj

    lead = [poly_eval(lin.lam0[i], 0.0) - poly_eval(lin.lam0[j], 0.0)
            for (i, j) in pairs]
    lam1_bound = float(np.max(np.abs(lead)))
    rho1 = float(np.min(np.abs(lead))) / 2.0
    return SystemSpec(dim=m, M_coeffs=M_coeffs, a_terms=a_terms,
                      g_terms=g_terms, L1=lam1_bound, Lambda1=lam1_bound,
                      rho1=rho1)


def u_matrix(lin: LinearSystemSpec, u_vec: np.ndarray) -> np.ndarray:
    """Assemble the off-diagonal matrix U from the solution vector."""
    U = np.zeros((lin.n, lin.n), dtype=complex)
    for q, (i, j) in enumerate(lin.pairs()):
        U[i, j] = u_vec[q]
    return U


def assemble_T(lin: LinearSystemSpec, U_eval, s: SqrtEps, x, alpha: float,
               quad_n: int = 24, tau_max: float | None = None) -> np.ndarray:
    """The normalizing transformation T(x) = (I + U(x)) e^{E(x)} with
    E = int_{sqrt(eps)}^x Diag(R (I+U)) d sigma.

    The path runs from x to the singular point sqrt(eps) along the
    t-line of constant Re(e^{i alpha} t) (staying inside the strip),
    where (sigma^2 - eps) decays exponentially:
        E = i e^{-i alpha} int_0^inf D(sigma(tau)) (sigma(tau)^2-eps) dtau,
        sigma(tau) = x(t(x) + i tau e^{-i alpha}).
    At x = sqrt(eps) exactly, T = I (U vanishes there)."""
    p = _as_sheet_point(x)
    xv = p.x
    eps = s.eps
    if s.is_zero:
        raise DomainError("normalization path requires sqrt(eps) != 0")
    if abs(xv - s.s) < 1e-13 * max(1.0, abs(s.s)):
        return np.eye(lin.n, dtype=complex)
    t0 = time_coord(p, s)
    theta = alpha - cmath.phase(s.s)
    rate = 2.0 * abs(s.s) * math.sin(theta)
    if rate <= 0:
        raise DomainError("direction alpha not admissible for this path")
    if tau_max is None:
        tau_max = 27.0 / rate
    # beyond e^{-rate tau} ~ 1e-12 the integrand is negligible and the
    # inverse time map collapses onto sqrt(eps) in floating point
    tau_max = min(tau_max, 27.0 / rate)
    from .geometry import inverse_time

    ea = cmath.exp(-1j * alpha)

    def integrand(tau):
        t = t0 + 1j * tau * ea
        sigp = inverse_time(t, s)
        sig = sigp.x
        # keep the sheet index: the path may wind around +-sqrt(eps)
        U = u_matrix(lin, U_eval(sigp))
        D = np.diagonal(lin.R_at(sig, eps) @ (np.eye(lin.n) + U))
        return D * (sig * sig - eps)

    # composite Gauss-Legendre panels, geometrically graded toward 0
    xg, wg = np.polynomial.legendre.leggauss(16)
    edges = [0.0]
    step = min(1.0 / rate, tau_max / quad_n)
    tau = 0.0
    while tau < tau_max:
        tau = min(tau + step, tau_max)
        edges.append(tau)
        step *= 1.5
    E = np.zeros(lin.n, dtype=complex)
    for lo, hi in zip(edges[:-1], edges[1:]):
        h2, mid = (hi - lo) / 2.0, (hi + lo) / 2.0
        for g, w in zip(xg, wg):
            E += integrand(mid + h2 * g) * (w * h2)
    E = 1j * ea * E
    U0 = u_matrix(lin, U_eval(p))
    return (np.eye(lin.n) + U0) @ np.diag(np.exp(E))


def normalization_residual(lin: LinearSystemSpec, T_eval, x, s: SqrtEps,
                           h: float, direction: float = 0.0) -> float:
    """Matrix sup-norm of (x^2-eps) T' - (Lambda + (x^2-eps) R) T
    + T Lambda, with Richardson-extrapolated central difference."""
    p = _as_sheet_point(x)
    xv = p.x
    eps = s.eps
    e = cmath.exp(1j * direction)

    def deriv(step):
        return (np.asarray(T_eval(xv + step * e))
                - np.asarray(T_eval(xv - step * e))) / (2 * step * e)

    dT = (4.0 * deriv(h / 2) - deriv(h)) / 3.0
    T = np.asarray(T_eval(xv))
    A = lin.Lambda_at(xv, eps) + (xv * xv - eps) * lin.R_at(xv, eps)
    res = (xv * xv - eps) * dT - A @ T + T @ lin.Lambda_at(xv, eps)
    return float(np.max(np.abs(res)))


__all__ = [
    "LinearSystemSpec", "center_manifold_eval", "strip_margin",
    "ode_residual", "confluence_table", "riccati_reduce", "u_matrix",
    "assemble_T", "normalization_residual",
]
