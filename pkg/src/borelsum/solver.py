"""Fixed-point solver for the Borel-plane image of the prepared system

    (x^2 - eps) y' = M(eps) y + f(x, y, eps).

In the Borel variable the equation becomes

    y~(xi) = (xi I - M(eps))^{-1} B[f(x, y)](xi),

with B[f] assembled from convolution powers of y~, the x-image
convolution, and exact chi*polynomial kernels for the (x^2-eps) g_l
terms.  The iteration is plain Picard from 0, contracting on the offset
lattice of lines for admissible directions alpha.

Also here: the residue-series coefficients of the solution at the second
singular point, computed from a local power-series recursion in the
Mobius coordinate w = (x + s)/(x - s).
"""

from __future__ import annotations

import cmath
import hashlib
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ConvergenceError, DomainError
from .geometry import SqrtEps, strip_width
from .lines import (LineFunction, StripFunction, convolve, fit_tails,
                    convolve_kernel_grid, convolve_xtilde, make_line_function)
from .polyops import poly_eval
from .series import SystemSpec, mi_order
from .transforms import chi_poly_eval, system_rhs_borel

DEFAULT_OFFSETS = np.array([-1.0, -0.5, 0.0, 0.5, 1.0])


@dataclass(frozen=True)
class OmegaGrid:
    """Discretization of the offset lattice for one direction and side."""

    spec: SystemSpec
    s: SqrtEps
    alpha: float
    side: str
    lam: float
    half_width: float
    n: int
    offsets: np.ndarray

    @property
    def weights(self) -> tuple:
        """Exponential norm weights (A, B) with Re(e^{ia}A) < Re(e^{ia}B)
        matching the t-strip of this side."""
        ea = cmath.exp(-1j * self.alpha)
        if self.s.is_zero:
            A = self.lam * ea
            return (A, A + ea) if self.side == "+" else (-(self.lam + 1) * ea,
                                                         -self.lam * ea)
        W = strip_width(self.alpha, self.s)
        if self.side == "+":
            return self.lam * ea, (W - self.lam) * ea
        return -(W - self.lam) * ea, -self.lam * ea


@dataclass
class OmegaSolution:
    """Converged Borel-plane solution on one direction/side."""

    grid: OmegaGrid
    strip: StripFunction
    info: dict = field(default_factory=dict)

    @property
    def s(self) -> SqrtEps:
        return self.grid.s

    @property
    def alpha(self) -> float:
        return self.grid.alpha

    @property
    def side(self) -> str:
        return self.grid.side


def build_omega_grid(spec: SystemSpec, s: SqrtEps, alpha: float, side: str,
                     lam: float, half_width: float | None = None,
                     n: int = 1025, offsets=None) -> OmegaGrid:
    """Validate and assemble the line lattice for one direction.

    Checks: Lambda above the spectral bound, a nonempty t-strip, and that
    no lattice node comes close to the spectrum of M(eps) (where the
    resolvent in the fixed-point map blows up).
    """
    if side not in ("+", "-"):
        raise ConfigError("side must be '+' or '-'")
    if n % 2 == 0 or n < 9:
        raise ConfigError("need an odd node count n >= 9")
    if lam <= spec.Lambda1:
        raise DomainError("Lambda must exceed the spectral bound Lambda1")
    if not s.is_zero:
        W = strip_width(alpha, s)
        if W <= 2 * lam:
            raise DomainError("empty strip: width <= 2*Lambda for this alpha")
    if half_width is None:
        half_width = max(8.0, 6.0 / lam)
    offsets = DEFAULT_OFFSETS.copy() if offsets is None else np.asarray(offsets, float)
    if s.is_zero:
        offsets = np.array([0.0])
    grid = OmegaGrid(spec=spec, s=s, alpha=alpha, side=side, lam=lam,
                     half_width=float(half_width), n=int(n), offsets=offsets)
    # spectrum clearance
    lams = np.linalg.eigvals(spec.M_at(s.eps))
    ea = cmath.exp(1j * alpha)
    u = np.linspace(-half_width, half_width, n)
    if s.is_zero:
        u = u[u >= 0]  # one-sided support: only the ray matters
    for kappa in offsets:
        xi = kappa * s.s + ea * u
        d = np.min(np.abs(xi[:, None] - lams[None, :]))
        if d < max(1e-9, 0.05 * spec.rho1):
            raise DomainError("lattice line passes through the spectrum of "
                              "M(eps); change alpha or Lambda")
    return grid


# ---------------------------------------------------------------------------
# the fixed-point map


def _component_strip(phi: StripFunction, i: int) -> StripFunction:
    lines = []
    for lf in phi.lines:
        lines.append(LineFunction(base=lf.base, alpha=lf.alpha,
                                  half_width=lf.half_width,
                                  values=lf.values[:, i:i + 1],
                                  tail_plus_amp=None if lf.tail_plus_amp is None
                                  else lf.tail_plus_amp[i:i + 1],
                                  tail_plus_mu=None if lf.tail_plus_mu is None
                                  else lf.tail_plus_mu[i:i + 1],
                                  tail_minus_amp=None if lf.tail_minus_amp is None
                                  else lf.tail_minus_amp[i:i + 1],
                                  tail_minus_mu=None if lf.tail_minus_mu is None
                                  else lf.tail_minus_mu[i:i + 1],
                                  support=lf.support))
    return StripFunction(s=phi.s, alpha=phi.alpha, offsets=phi.offsets,
                         lines=tuple(lines))


def _conv_power_table(phi: StripFunction, needed) -> dict:
    """Convolution powers phi^{*l} (scalar strips) for every multi-index in
    `needed`, built by peeling one component at a time and memoizing."""
    m = phi.dim
    table: dict = {}
    comps = [_component_strip(phi, i) for i in range(m)]

    def get(l: tuple) -> StripFunction:
        if l in table:
            return table[l]
        k = mi_order(l)
        if k == 0:
            raise ConfigError("power for |l| = 0 undefined")
        i = next(j for j in range(m) if l[j] > 0)
        if k == 1:
            table[l] = comps[i]
            return table[l]
        lm = tuple(l[j] - (1 if j == i else 0) for j in range(m))
        parent = get(lm)
        a_central = comps[i].central
        lines = []
        for kap, line in zip(parent.offsets, parent.lines):
            lines.append(convolve(a_central, line))
        table[l] = StripFunction(s=phi.s, alpha=phi.alpha,
                                 offsets=parent.offsets, lines=tuple(lines))
        return table[l]

    for l in needed:
        get(tuple(l))
    return table


def _zero_strip(grid: OmegaGrid) -> StripFunction:
    m = grid.spec.dim
    support = "plus" if grid.s.is_zero else "full"
    lines = []
    for kappa in grid.offsets:
        vals = np.zeros((grid.n, m), dtype=complex)
        lines.append(fit_tails(LineFunction(base=kappa * grid.s.s,
                                            alpha=grid.alpha,
                                            half_width=grid.half_width,
                                            values=vals, support=support)))
    return StripFunction(s=grid.s, alpha=grid.alpha, offsets=grid.offsets,
                         lines=tuple(lines))


def _kernel_line(grid: OmegaGrid, coeffs: np.ndarray) -> LineFunction:
    """chi * Q sampled on the central ray (s=0 only), plus-supported."""
    ev = lambda z: chi_poly_eval(coeffs, z, grid.side, grid.s, alpha=grid.alpha)
    return make_line_function(ev, 0.0, grid.alpha, grid.half_width, grid.n,
                              support="plus")


def apply_G(grid: OmegaGrid, phi: StripFunction,
            rhs_data: dict | None = None) -> StripFunction:
    """One application of the fixed-point map
    G[phi] = (xi I - M(eps))^{-1} B[f(x, L[phi])]."""
    spec, s = grid.spec, grid.s
    m = spec.dim
    eps = s.eps
    if rhs_data is None:
        rhs_data = system_rhs_borel(spec, s, grid.side)

    needed = [l for l in set(spec.m_terms) | set(spec.a_terms)
              | set(spec.g_terms) if mi_order(l) >= 1]
    table = _conv_power_table(phi, needed)

    rhs = {float(k): np.zeros((grid.n, m), dtype=complex) for k in grid.offsets}

    # m_l y^l terms: plain convolution powers scaled by m_l(eps)
    for l, c in spec.m_terms.items():
        vec = np.array([poly_eval(c[:, i], eps) for i in range(m)])
        pw = table[tuple(l)]
        for kap in grid.offsets:
            rhs[float(kap)] += pw.line(float(kap)).values[:, :1] * vec[None, :]

    # x a_l y^l terms: the x-image convolution of the power
    for l, c in spec.a_terms.items():
        vec = np.array([poly_eval(c[:, i], eps) for i in range(m)])
        xt = convolve_xtilde(table[tuple(l)], grid.side, s)
        for kap in grid.offsets:
            rhs[float(kap)] += xt.line(float(kap)).values[:, :1] * vec[None, :]

    # (x^2 - eps) g_l y^l terms: exact chi*polynomial kernels
    for l in spec.g_terms:
        Q = rhs_data[tuple(l)]["chipoly"]
        if not np.any(Q):
            continue
        if mi_order(l) == 0:
            for kap in grid.offsets:
                line = phi.line(float(kap))
                vals = chi_poly_eval(Q, line.xi_nodes, grid.side, s,
                                     alpha=grid.alpha)
                rhs[float(kap)] += vals
        else:
            pw = table[tuple(l)]
            if s.is_zero:
                kern = _kernel_line(grid, Q)
                conv = convolve(kern, pw.central)
                rhs[0.0] += conv.values
            else:
                ev = lambda z: chi_poly_eval(Q, z, grid.side, s)
                for kap in grid.offsets:
                    conv = convolve_kernel_grid(ev, pw.line(float(kap)), 0.0,
                                                tail_fit=False)
                    rhs[float(kap)] += conv.values

    # resolve: (xi I - M)^{-1} per node, batched
    M = spec.M_at(eps)
    ea = cmath.exp(1j * grid.alpha)
    u = np.linspace(-grid.half_width, grid.half_width, grid.n)
    support = "plus" if s.is_zero else "full"
    lines = []
    for kap in grid.offsets:
        xi = kap * s.s + ea * u
        if s.is_zero:
            # solve on the supported half-line only; the other half is 0
            half = (grid.n - 1) // 2
            A = xi[half:, None, None] * np.eye(m) - M[None, :, :]
            vals = np.zeros((grid.n, m), dtype=complex)
            vals[half:] = np.linalg.solve(
                A, rhs[float(kap)][half:, :, None])[:, :, 0]
        else:
            A = xi[:, None, None] * np.eye(m) - M[None, :, :]
            vals = np.linalg.solve(A, rhs[float(kap)][:, :, None])[:, :, 0]
        lines.append(fit_tails(LineFunction(base=kap * s.s, alpha=grid.alpha,
                                            half_width=grid.half_width,
                                            values=vals, support=support)))
    return StripFunction(s=s, alpha=grid.alpha, offsets=grid.offsets,
                         lines=tuple(lines))


def _weighted_diff(grid: OmegaGrid, a: StripFunction, b: StripFunction) -> float:
    """Weighted sup distance on the grid nodes under the strip weights."""
    A, B = grid.weights
    out = -math.inf
    for la, lb in zip(a.lines, b.lines):
        xi = la.xi_nodes
        lw = np.maximum(-(A * xi).real, -(B * xi).real)
        d = np.max(np.abs(la.values - lb.values), axis=1)
        nz = d > 0
        if not np.any(nz):
            continue
        # log-space product: the weights overflow where the data underflows
        ld = np.log(d[nz]) + lw[nz]
        out = max(out, float(np.max(ld)))
    return 0.0 if out == -math.inf else math.exp(min(out, 700.0))


def solve_fixed_point(spec: SystemSpec, s: SqrtEps, alpha: float, side: str,
                      lam: float, half_width: float | None = None,
                      n: int = 1025, tol: float = 1e-10, max_iter: int = 200,
                      retries: int = 3) -> OmegaSolution:
    """Picard iteration from 0.  On failure to contract, retry with a
    larger Lambda (narrower weight window, stronger contraction), up to
    `retries` times."""
    attempt = 0
    lam_try = lam
    last_err = None
    while attempt <= retries:
        grid = build_omega_grid(spec, s, alpha, side, lam_try,
                                half_width=half_width, n=n)
        try:
            return _solve_on_grid(grid, tol, max_iter)
        except ConvergenceError as e:
            last_err = e
            attempt += 1
            lam_try *= 1.4
            if not s.is_zero and strip_width(alpha, s) <= 2 * lam_try:
                break
    raise ConvergenceError(f"fixed point did not converge after retries: "
                           f"{last_err}")


def _solve_on_grid(grid: OmegaGrid, tol: float, max_iter: int) -> OmegaSolution:
    rhs_data = system_rhs_borel(grid.spec, grid.s, grid.side)
    zero = _zero_strip(grid)
    phi = zero
    rel_diffs = []
    for it in range(max_iter):
        nxt = apply_G(grid, phi, rhs_data)
        d = _weighted_diff(grid, nxt, phi)
        scale = max(_weighted_diff(grid, nxt, zero), 1e-300)
        rel = d / scale
        rel_diffs.append(rel)
        phi = nxt
        if rel < tol:
            rates = [rel_diffs[i + 1] / rel_diffs[i]
                     for i in range(len(rel_diffs) - 1) if rel_diffs[i] > 0]
            info = {"iterations": it + 1, "final_diff": d,
                    "relative_diff": rel,
                    "contraction_rate": max(rates[-3:]) if rates else 0.0,
                    "lambda": grid.lam}
            return OmegaSolution(grid=grid, strip=phi, info=info)
        if not math.isfinite(rel):
            raise ConvergenceError("Picard iteration diverged")
        # A transient rise of the difference is normal while the iterate
        # builds up from 0; declare divergence only on sustained clear
        # growth well above the running minimum.
        if (len(rel_diffs) >= 4
                and all(rel_diffs[-k] >= rel_diffs[-k - 1] for k in (1, 2, 3))
                and rel_diffs[-1] > 10.0 * min(rel_diffs)):
            raise ConvergenceError("Picard iteration not contracting")
    raise ConvergenceError("Picard iteration exceeded max_iter")


def conjugate_minus(sol: OmegaSolution) -> OmegaSolution:
    """The side '-' solution from the side '+' one on the same lines via
    y~-(xi) = e^{xi pi i / s} y~+(xi), computed in log form to avoid
    overflow where y~+ underflows."""
    if sol.side != "+":
        raise ConfigError("conjugate_minus expects a side '+' solution")
    s = sol.s
    if s.is_zero:
        raise DomainError("no conjugation at s=0; solve the opposite "
                          "direction instead")
    q = 1j * math.pi / s.s
    grid = sol.grid

    def conv_line(lf: LineFunction) -> LineFunction:
        xi = lf.xi_nodes
        v = lf.values
        nz = np.abs(v) > 0
        logv = np.where(nz, np.log(np.where(nz, v, 1.0)), 0.0)
        expo = q * xi[:, None] + logv
        # the minus solution obeys the same weighted sup bound as the plus
        # one; a conjugated value far above it comes from amplified
        # underflow noise in the deep tail, not from data
        scale = max(float(np.max(np.abs(v))), 1e-300)
        cap = math.log(scale) + grid.lam * np.abs(lf.nodes) + 50.0
        good = nz & (expo.real <= cap[:, None])
        with np.errstate(over="ignore"):
            out = np.where(good, np.exp(np.clip(expo.real, -745, 700)
                                        + 1j * expo.imag), 0.0)
        return fit_tails(LineFunction(base=lf.base, alpha=lf.alpha,
                                      half_width=lf.half_width, values=out))

    new_grid = OmegaGrid(spec=grid.spec, s=grid.s, alpha=grid.alpha, side="-",
                         lam=grid.lam, half_width=grid.half_width, n=grid.n,
                         offsets=grid.offsets)
    lines = tuple(conv_line(l) for l in sol.strip.lines)
    strip = StripFunction(s=s, alpha=sol.alpha, offsets=sol.strip.offsets,
                          lines=lines)
    return OmegaSolution(grid=new_grid, strip=strip,
                         info=dict(sol.info, conjugated=True))


# ---------------------------------------------------------------------------
# residue series at the second singular point


def spectrum_gap_ok(M0: np.ndarray) -> bool:
    """True when 0 lies outside the convex hull of the spectrum of M0,
    i.e. the eigenvalue arguments leave a circular gap wider than pi."""
    args = np.sort(np.angle(np.linalg.eigvals(M0)))
    gaps = np.diff(np.concatenate([args, [args[0] + 2 * math.pi]]))
    return float(np.max(gaps)) > math.pi + 1e-12


def residue_coefficients(spec: SystemSpec, s: SqrtEps, K: int) -> np.ndarray:
    """Coefficients c_k, k = 1..K, of the local solution y = sum c_k w^k
    in the Mobius coordinate w = (x + s)/(x - s) at the second singular
    point x = -s.  Returns an array of shape (K+1, m) with c_0 = 0.

    Order-k relation: (-2 k s I - M(eps) + s A) c_k = [w^k] f(x(w), y_{<k})
    where A collects the linear a-coefficient columns.
    """
    if s.is_zero:
        raise DomainError("residue series requires sqrt(eps) != 0")
    sv = s.s
    eps = sv * sv
    m = spec.dim
    M = spec.M_at(eps)
    A = np.zeros((m, m), dtype=complex)
    for i in range(m):
        e = tuple(1 if j == i else 0 for j in range(m))
        if e in spec.a_terms:
            c = spec.a_terms[e]
            A[:, i] = np.array([poly_eval(c[:, r], eps) for r in range(m)])

    # w-series of x and x^2 - eps up to order K
    xw = np.zeros(K + 1, dtype=complex)
    xw[0] = -sv
    xw[1:] = -2.0 * sv
    Pw = np.zeros(K + 1, dtype=complex)
    Pw[1:] = 4.0 * eps * np.arange(1, K + 1)

    c = np.zeros((K + 1, m), dtype=complex)

    def series_pow(base: np.ndarray, l: tuple) -> np.ndarray:
        out = np.zeros(K + 1, dtype=complex)
        out[0] = 1.0
        for i, li in enumerate(l):
            for _ in range(li):
                out = np.convolve(out, base[:, i])[: K + 1]
        return out

    for k in range(1, K + 1):
        # f-series with data known through order k-1 (c_k currently 0)
        fser = np.zeros((K + 1, m), dtype=complex)
        for l, cf in spec.m_terms.items():
            vec = np.array([poly_eval(cf[:, i], eps) for i in range(m)])
            pw = series_pow(c, l)
            fser += pw[:, None] * vec[None, :]
        for l, cf in spec.a_terms.items():
            vec = np.array([poly_eval(cf[:, i], eps) for i in range(m)])
            pw = np.convolve(series_pow(c, l), xw)[: K + 1]
            fser += pw[:, None] * vec[None, :]
        for l, cf in spec.g_terms.items():
            # g_l(x, eps): polynomial in x -> w-series composition
            gx = np.array([[poly_eval(cf[ki, :, i], eps)
                            for i in range(m)]
                           for ki in range(cf.shape[0])])  # (dx+1, m)
            gw = np.zeros((K + 1, m), dtype=complex)
            xpow = np.zeros(K + 1, dtype=complex)
            xpow[0] = 1.0
            for ki in range(gx.shape[0]):
                gw += xpow[:, None] * gx[ki][None, :]
                xpow = np.convolve(xpow, xw)[: K + 1]
            pw = np.convolve(series_pow(c, l), Pw)[: K + 1]
            fser += np.array([np.convolve(pw, gw[:, i])[: K + 1]
                              for i in range(m)]).T
        lhs = -2.0 * k * sv * np.eye(m) - M + sv * A
        if abs(np.linalg.det(lhs)) < 1e-14 * max(1.0, np.linalg.norm(lhs)) ** m:
            raise ConvergenceError(f"resonance at order {k}: "
                                   "-2 k sqrt(eps) meets the spectrum")
        c[k] = np.linalg.solve(lhs, fser[k])
    return c


def residue_series_eval(coeffs: np.ndarray, x, s: SqrtEps) -> np.ndarray:
    """Evaluate y(x) = sum_k c_k w^k, w = (x + s)/(x - s), |w| < 1."""
    x = np.asarray(x, dtype=complex)
    w = (x + s.s) / (x - s.s)
    if np.any(np.abs(w) >= 1.0):
        raise DomainError("x outside the residue-series disc |w| < 1")
    K = coeffs.shape[0] - 1
    out = np.zeros(x.shape + (coeffs.shape[1],), dtype=complex)
    for k in range(K, 0, -1):
        out = (out + coeffs[k]) * w[..., None]
    return out


# ---------------------------------------------------------------------------
# export


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def export_solution(sol: OmegaSolution, outdir: str, tag: str = "sol") -> str:
    """Write per-offset CSVs and a JSON manifest; returns the manifest path."""
    os.makedirs(outdir, exist_ok=True)
    files = []
    for kap, line in zip(sol.strip.offsets, sol.strip.lines):
        name = f"{tag}_offset_{kap:+.2f}.csv".replace("+", "p").replace("-", "m")
        path = os.path.join(outdir, name)
        line.dump_csv(path)
        files.append({"offset": float(kap), "file": name,
                      "sha256": _sha256(path)})
    manifest = {
        "tag": tag,
        "sqrt_eps": [sol.s.s.real, sol.s.s.imag],
        "alpha": sol.alpha,
        "side": sol.side,
        "lambda": sol.grid.lam,
        "half_width": sol.grid.half_width,
        "nodes": sol.grid.n,
        "dim": sol.strip.dim,
        "info": {k: (float(v) if isinstance(v, (int, float)) else v)
                 for k, v in sol.info.items()},
        "lines": files,
    }
    mpath = os.path.join(outdir, f"{tag}_manifest.json")
    with open(mpath, "w") as f:
        json.dump(manifest, f, indent=2)
    return mpath


__all__ = [
    "OmegaGrid", "OmegaSolution", "build_omega_grid", "apply_G",
    "solve_fixed_point", "conjugate_minus", "residue_coefficients",
    "residue_series_eval", "spectrum_gap_ok", "export_solution",
]
