"""Sampled analytic functions on lines and strips of the Borel plane.

A LineFunction stores uniform samples of a (vector-valued) function on a
segment of the line base + e^{i alpha} [-T, T], plus single-exponential
tail models fitted on the outer nodes.  A StripFunction bundles the
offset lattice {-s, -s/2, 0, s/2, s} of lines that the x-image
convolution needs.  Convolutions are discrete (uniform-grid) with the
half-value convention at ray endpoints making the s=0 one-sided calculus
exact trapezoid rule.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import simpson

from .errors import ConfigError, ConvergenceError, DomainError
from .geometry import SqrtEps


@dataclass(frozen=True)
class DiracAtom:
    """Translation unit of the convolution algebra: weight * delta_{location}."""

    location: complex
    weight: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "location", complex(self.location))
        object.__setattr__(self, "weight",
                          np.atleast_1d(np.asarray(self.weight, dtype=complex)))
        if not np.all(np.isfinite(self.weight)):
            raise ConfigError("non-finite atom weight")


@dataclass(frozen=True)
class LineFunction:
    """Uniform samples on base + e^{i alpha} u, u in [-T, T].

    values: (n,) or (n, m) complex.  Tail models describe the function
    beyond the sampled segment:
        u >= T:  amp_p * exp(mu_p * (u - T))
        u <= -T: amp_m * exp(mu_m * (-u - T))
    per component (arrays of shape (m,), or None for an untailed end).
    support='plus' marks s=0 ray functions vanishing for u < 0, stored
    with the half-value convention at u = 0.
    """

    base: complex
    alpha: float
    half_width: float
    values: np.ndarray
    tail_plus_amp: np.ndarray | None = None
    tail_plus_mu: np.ndarray | None = None
    tail_minus_amp: np.ndarray | None = None
    tail_minus_mu: np.ndarray | None = None
    support: str = "full"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.ndim == 1:
            v = v[:, None]
        if v.shape[0] < 8:
            raise ConfigError("need at least 8 nodes")
        if not np.all(np.isfinite(v)):
            raise ConfigError("non-finite line samples")
        object.__setattr__(self, "values", v)
        for name in ("tail_plus_amp", "tail_plus_mu", "tail_minus_amp", "tail_minus_mu"):
            t = getattr(self, name)
            if t is not None:
                object.__setattr__(self, name,
                                   np.atleast_1d(np.asarray(t, dtype=complex)))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def h(self) -> float:
        return 2.0 * self.half_width / (self.n - 1)

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.n)

    @property
    def xi_nodes(self) -> np.ndarray:
        return self.base + cmath.exp(1j * self.alpha) * self.nodes

    # -- evaluation beyond / between nodes ----------------------------------

    def _tail_value(self, u: float) -> np.ndarray:
        T = self.half_width
        if u > T:
            if self.tail_plus_amp is None:
                return np.zeros(self.dim, dtype=complex)
            return self.tail_plus_amp * np.exp(self.tail_plus_mu * (u - T))
        if self.support == "plus" or self.tail_minus_amp is None:
            return np.zeros(self.dim, dtype=complex)
        return self.tail_minus_amp * np.exp(self.tail_minus_mu * (-u - T))

    def values_at_grid(self, idx: np.ndarray) -> np.ndarray:
        """Values at integer node indices (0..n-1 on grid), using tail
        models outside; idx may be any integers."""
        idx = np.asarray(idx, dtype=int)
        out = np.zeros((idx.shape[0], self.dim), dtype=complex)
        inside = (idx >= 0) & (idx < self.n)
        out[inside] = self.values[idx[inside]]
        T, h = self.half_width, self.h
        for j in np.nonzero(~inside)[0]:
            out[j] = self._tail_value((idx[j] - (self.n - 1) / 2.0) * h)
        return out

    def sample(self, u, order: int = 8) -> np.ndarray:
        """Local-polynomial interpolation at arbitrary positions u along
        the line; tail models outside the segment."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        out = np.zeros((u.shape[0], self.dim), dtype=complex)
        T, h, n = self.half_width, self.h, self.n
        for j, uu in enumerate(u):
            if uu > T or uu < -T:
                out[j] = self._tail_value(uu)
                continue
            if self.support == "plus" and uu < 0:
                continue
            pos = (uu + T) / h
            lo = int(math.floor(pos)) - (order // 2 - 1)
            lo_min = 0
            if self.support == "plus" and uu > 0:
                lo_min = (n - 1) // 2  # never reach across the ray endpoint
                # at the endpoint itself the stored half-value convention
                # is kept, so start one node in when interpolating u>0
                lo_min += 1 if pos > lo_min + 1e-9 else 0
            lo = min(max(lo, lo_min), n - order)
            if lo < 0:
                lo = 0
            js = np.arange(lo, lo + order)
            # Lagrange weights
            w = np.ones(order)
            for a in range(order):
                for b in range(order):
                    if a != b:
                        w[a] *= (pos - js[b]) / (js[a] - js[b])
            out[j] = w @ self.values[js]
        return out

    def dump_csv(self, path: str):
        """Columns: u, re(xi), im(xi), then re(v_i), im(v_i) per component."""
        u = self.nodes
        xi = self.xi_nodes
        cols = [u, xi.real, xi.imag]
        header = ["u", "re_xi", "im_xi"]
        for i in range(self.dim):
            cols += [self.values[:, i].real, self.values[:, i].imag]
            header += [f"re_v{i}", f"im_v{i}"]
        data = np.column_stack(cols)
        np.savetxt(path, data, delimiter=",", header=",".join(header),
                   comments="", fmt="%.16e")


def _fit_tail_1d(vals: np.ndarray, h: float, plus_end: bool) -> tuple:
    """Fit amp * exp(mu * distance-from-edge) on the outer samples of one
    component; returns (amp, mu) with amp=0 when the data is essentially 0."""
    n = vals.shape[0]
    k = max(6, n // 10)
    w = vals[-k:] if plus_end else vals[:k][::-1]
    mags = np.abs(w)
    if mags[-1] < 1e-280 or np.any(mags < 1e-280):
        return 0.0 + 0.0j, 0.0 + 0.0j
    # an edge that sits at the roundoff floor of the line carries no signal
    if mags[-1] < 1e-15 * float(np.max(np.abs(vals))):
        return 0.0 + 0.0j, 0.0 + 0.0j
    ratios = w[1:] / w[:-1]
    logs = np.log(ratios)
    mu = np.mean(logs) / h
    amp = w[-1]
    # require a roughly consistent exponential trend; otherwise use the
    # outermost local rate (conservative for super-exponential decay)
    if np.std(logs.real) > 0.5 * abs(np.mean(logs.real)) + 0.3:
        mu = logs[-1] / h
    # tails of the weighted space never grow; a positive fitted rate is a
    # fitting artifact, so cap it at a flat continuation
    if mu.real > 0:
        mu = 1j * mu.imag
    return amp, mu


def make_line_function(evaluator, c: complex, alpha: float, T: float, n: int,
                       tail_fit: bool = True, support: str = "full") -> LineFunction:
    """Sample an evaluator xi -> value on the line c + e^{i alpha}[-T, T]."""
    if n < 8:
        raise ConfigError("need n >= 8")
    u = np.linspace(-T, T, n)
    xi = c + cmath.exp(1j * alpha) * u
    vals = np.asarray(evaluator(xi), dtype=complex)
    if vals.shape[0] != n:
        vals = np.array([evaluator(z) for z in xi], dtype=complex)
    if vals.ndim == 1:
        vals = vals[:, None]
    if not np.all(np.isfinite(vals)):
        raise ConfigError("evaluator produced non-finite samples")
    lf = LineFunction(base=complex(c), alpha=float(alpha), half_width=float(T),
                      values=vals, support=support)
    return fit_tails(lf) if tail_fit else lf


def fit_tails(lf: LineFunction) -> LineFunction:
    m = lf.dim
    pa = np.zeros(m, dtype=complex)
    pm = np.zeros(m, dtype=complex)
    ma = np.zeros(m, dtype=complex)
    mm = np.zeros(m, dtype=complex)
    for i in range(m):
        pa[i], pm[i] = _fit_tail_1d(lf.values[:, i], lf.h, True)
        if lf.support == "full":
            ma[i], mm[i] = _fit_tail_1d(lf.values[:, i], lf.h, False)
    return replace(lf, tail_plus_amp=pa, tail_plus_mu=pm,
                   tail_minus_amp=ma, tail_minus_mu=mm)


# ---------------------------------------------------------------------------
# convolution


def _check_compatible(phi: LineFunction, psi: LineFunction):
    if abs(phi.alpha - psi.alpha) > 1e-12:
        raise ConfigError("direction mismatch in convolution")
    if phi.n != psi.n or abs(phi.half_width - psi.half_width) > 1e-12:
        raise ConfigError("convolution requires matching grids")
    if phi.n % 2 == 0:
        raise ConfigError("convolution grids must have an odd node count")


def convolve(phi: LineFunction, psi: LineFunction, tail_fit: bool = True) -> LineFunction:
    """(phi * psi)(xi) = int phi(sigma) psi(xi - sigma) d sigma over the
    line of phi, discretized on the shared uniform grid.  Component
    dimensions must match or one factor must be scalar (broadcast)."""
    _check_compatible(phi, psi)
    m1, m2 = phi.dim, psi.dim
    if m1 != m2 and 1 not in (m1, m2):
        raise ConfigError("component dimension mismatch")
    m = max(m1, m2)
    n = phi.n
    half = (n - 1) // 2
    ea = cmath.exp(1j * phi.alpha)
    out = np.zeros((n, m), dtype=complex)
    for i in range(m):
        a = phi.values[:, min(i, m1 - 1)]
        b = psi.values[:, min(i, m2 - 1)]
        full = np.convolve(a, b)
        out[:, i] = full[half: half + n] * phi.h * ea
    support = "plus" if (phi.support == "plus" and psi.support == "plus") else "full"
    lf = LineFunction(base=phi.base + psi.base, alpha=phi.alpha,
                      half_width=phi.half_width, values=out, support=support)
    return fit_tails(lf) if tail_fit else lf


def convolve_dirac(atom: DiracAtom, phi: LineFunction) -> LineFunction:
    """delta_a * phi: shift the base by a and scale by the weight."""
    w = atom.weight
    if w.shape[0] == 1:
        vals = phi.values * w[0]
        scale = np.full(phi.dim, w[0])
    elif w.shape[0] == phi.dim:
        vals = phi.values * w[None, :]
        scale = w
    else:
        raise ConfigError("atom weight dimension mismatch")

    def _sc(t):
        return None if t is None else t * scale

    return replace(phi, base=phi.base + atom.location, values=vals,
                   tail_plus_amp=_sc(phi.tail_plus_amp),
                   tail_minus_amp=_sc(phi.tail_minus_amp))


def convolve_kernel_grid(kernel_eval, phi: LineFunction, kernel_base: complex,
                         w_ext: int | None = None, tail_fit: bool = True) -> LineFunction:
    """Convolution of a closed-form kernel (evaluator on the kernel's own
    line kernel_base + e^{i alpha} R) with sampled phi:

        out(xi) = int K(sigma) phi(xi - sigma) d sigma.

    The kernel is evaluated on an extended grid; phi is read from its grid
    with tail models outside.  The output lives on the line with base
    kernel_base + phi.base and the grid of phi.
    """
    n, h, T = phi.n, phi.h, phi.half_width
    if n % 2 == 0:
        raise ConfigError("grids must have an odd node count")
    w = (n - 1) if w_ext is None else int(w_ext)
    ea = cmath.exp(1j * phi.alpha)
    v = np.arange(-(T + w * h), T + w * h + h / 2, h)[: n + 2 * w]
    K = np.asarray(kernel_eval(kernel_base + ea * v), dtype=complex)
    if K.ndim == 1:
        K = K[:, None]
    mk = K.shape[1]
    m = max(mk, phi.dim)
    if mk != phi.dim and 1 not in (mk, phi.dim):
        raise ConfigError("component dimension mismatch")
    # phi on the extended index range needed by the sum
    kidx = np.arange(2 * n + 2 * w - 1) - (n + w - 1) + (n - 1) // 2
    phi_big = phi.values_at_grid(kidx)
    out = np.zeros((n, m), dtype=complex)
    for i in range(m):
        a = K[:, min(i, mk - 1)]
        b = phi_big[:, min(i, phi.dim - 1)]
        full = np.convolve(a, b)
        out[:, i] = full[n + 2 * w - 1: 2 * n + 2 * w - 1] * h * ea
    lf = LineFunction(base=kernel_base + phi.base, alpha=phi.alpha,
                      half_width=T, values=out, support="full")
    return fit_tails(lf) if tail_fit else lf


# ---------------------------------------------------------------------------
# strips


@dataclass(frozen=True)
class StripFunction:
    """Bundle of LineFunctions on the offset lattice kappa * s,
    kappa in offsets (real multipliers, within [-3/2, 3/2])."""

    s: SqrtEps
    alpha: float
    offsets: np.ndarray
    lines: tuple

    def __post_init__(self):
        object.__setattr__(self, "offsets", np.asarray(self.offsets, dtype=float))
        object.__setattr__(self, "lines", tuple(self.lines))
        if len(self.lines) != self.offsets.shape[0]:
            raise ConfigError("offsets/lines length mismatch")
        if not np.any(np.abs(self.offsets) < 1e-12):
            raise ConfigError("central offset 0 must be present")
        if np.any(np.abs(self.offsets) > 1.5 + 1e-12):
            raise ConfigError("offsets must lie within [-3/2, 3/2] * s")

    @property
    def dim(self) -> int:
        return self.lines[0].dim

    def offset_index(self, kappa: float) -> int:
        i = int(np.argmin(np.abs(self.offsets - kappa)))
        if abs(self.offsets[i] - kappa) > 1e-9:
            raise DomainError(f"offset {kappa} not stored")
        return i

    def line(self, kappa: float) -> LineFunction:
        return self.lines[self.offset_index(kappa)]

    @property
    def central(self) -> LineFunction:
        return self.line(0.0)

    def decompose(self, xi: complex) -> tuple:
        """Solve xi = kappa * s + e^{i alpha} u for real (kappa, u)."""
        if self.s.is_zero:
            ea = cmath.exp(-1j * self.alpha)
            z = xi * ea
            if abs(z.imag) > 1e-9 * max(1.0, abs(z)):
                raise DomainError("xi not on the ray line")
            return 0.0, z.real
        sv = self.s.s
        ea = cmath.exp(1j * self.alpha)
        det = sv.real * ea.imag - sv.imag * ea.real
        if abs(det) < 1e-14:
            raise DomainError("line direction parallel to s")
        kappa = (xi.real * ea.imag - xi.imag * ea.real) / det
        u = (sv.real * xi.imag - sv.imag * xi.real) / det
        return kappa, u

    def eval(self, xi) -> np.ndarray:
        """Value at an arbitrary point of the strip: interpolate across
        offsets at the matched transverse position, then along the line."""
        kappa, u = self.decompose(complex(xi))
        near = np.abs(self.offsets - kappa) < 1e-9
        if np.any(near):
            return self.lines[int(np.argmax(near))].sample(u)[0]
        return resample_values(self, kappa, np.array([u]))[0]


def resample_values(phi: StripFunction, kappa: float, u: np.ndarray) -> np.ndarray:
    """Lagrange interpolation across the offset lattice at fixed transverse
    positions u (positions are matched per line grid)."""
    offs = phi.offsets
    if not offs.min() - 1e-9 <= kappa <= offs.max() + 1e-9:
        raise DomainError("offset outside the stored lattice hull")
    w = np.ones(offs.shape[0])
    for a in range(offs.shape[0]):
        for b in range(offs.shape[0]):
            if a != b:
                w[a] *= (kappa - offs[b]) / (offs[a] - offs[b])
    out = None
    for wa, line in zip(w, phi.lines):
        v = line.sample(u)
        out = wa * v if out is None else out + wa * v
    return out


def resample_offset(phi: StripFunction, c_new: complex) -> LineFunction:
    """LineFunction on the new offset line c_new (within the lattice hull)
    by polynomial interpolation across offsets at matched transverse
    positions."""
    if phi.s.is_zero:
        if abs(c_new) > 1e-12:
            raise DomainError("no offsets available at s=0")
        return phi.central
    kappa = c_new / phi.s.s
    if abs(kappa.imag) > 1e-9:
        raise DomainError("offset must be a real multiple of s")
    kappa = kappa.real
    near = np.abs(phi.offsets - kappa) < 1e-12
    if np.any(near):
        return phi.lines[int(np.argmax(near))]
    ref = phi.central
    vals = resample_values(phi, kappa, ref.nodes)
    lf = LineFunction(base=complex(c_new), alpha=phi.alpha,
                      half_width=ref.half_width, values=vals)
    return fit_tails(lf)


def strip_map(phi: StripFunction, fn) -> StripFunction:
    """Apply a LineFunction -> LineFunction map to every stored line."""
    return StripFunction(s=phi.s, alpha=phi.alpha, offsets=phi.offsets,
                         lines=tuple(fn(l) for l in phi.lines))


# ---------------------------------------------------------------------------
# the x-image convolution


def convolve_xtilde(phi: StripFunction, side: str, s: SqrtEps,
                    tail_fit: bool = True) -> StripFunction:
    """Convolution with the Borel image of x (a chi line-distribution plus
    a sqrt(eps) Dirac part):

        [xt * phi](xi) = int_{c1 + e^{i alpha} R} chi(sigma) phi(xi - sigma)
                         d sigma + s * phi(xi),   c1 = +s,
                       = (same with c2 = -s)      - s * phi(xi).

    The representation is chosen per target offset so the shifted argument
    line stays on the stored lattice: targets kappa > 0 use the c1 = +s
    kernel line (argument offset kappa - 1), targets kappa <= 0 use
    c2 = -s (argument offset kappa + 1).  At s = 0 this degenerates to the
    one-sided ray convolution with the Heaviside kernel chi+(., 0).
    """
    from .transforms import chi_eval  # late import to avoid a module cycle

    if s.is_zero:
        # kernel chi(.,0): for side '+' the Heaviside on the ray; the ray
        # convolution of plus-supported data stays plus-supported
        def do_line(lf: LineFunction) -> LineFunction:
            n, h = lf.n, lf.h
            half = (n - 1) // 2
            ea = cmath.exp(1j * lf.alpha)
            vals = np.zeros_like(lf.values)
            # one-sided running sum: (1 * phi)(u) = int_0^u phi, with the
            # half-value endpoint convention giving trapezoid weights
            psi = lf.values[half:]
            run = np.cumsum(psi, axis=0) - 0.5 * psi  # trapezoid partial sums
            vals[half:] = run * h * ea
            vals[half] = 0.0
            if side == "-":
                # chi-(.,0) = chi+(.,0) - 1: subtract the full line integral
                total = (np.sum(psi, axis=0) - 0.5 * psi[0]) * h * ea
                vals[half:] = vals[half:] - total[None, :]
                # note: for plus-supported data this leaves minus-ray values 0
            out = LineFunction(base=lf.base, alpha=lf.alpha,
                               half_width=lf.half_width, values=vals,
                               support=lf.support)
            return fit_tails(out) if tail_fit else out

        return strip_map(phi, do_line)

    sv = s.s
    new_lines = []
    for kappa in phi.offsets:
        if kappa > 1e-12:
            c1, shift_sign, src = sv, +1.0, kappa - 1.0
        else:
            c1, shift_sign, src = -sv, -1.0, kappa + 1.0
        src_line = phi.line(src)
        kern = lambda z: chi_eval(z, side, s)
        conv = convolve_kernel_grid(kern, src_line, c1, tail_fit=False)
        own = phi.line(float(kappa))
        vals = conv.values + shift_sign * sv * own.values
        lf = LineFunction(base=own.base, alpha=phi.alpha,
                          half_width=own.half_width, values=vals)
        new_lines.append(fit_tails(lf) if tail_fit else lf)
    return StripFunction(s=s, alpha=phi.alpha, offsets=phi.offsets,
                         lines=tuple(new_lines))


# ---------------------------------------------------------------------------
# norms


def _weights_on(xi: np.ndarray, A: complex, B: complex) -> np.ndarray:
    return np.exp(-(A * xi).real) + np.exp(-(B * xi).real)


def _check_norm_pre(phi: LineFunction, A: complex, B: complex):
    ea = cmath.exp(1j * phi.alpha)
    if not (ea * A).real < (ea * B).real:
        raise ConfigError("weights must satisfy Re(e^{ia}A) < Re(e^{ia}B)")


def norm_sup(phi: LineFunction, A: complex, B: complex) -> float:
    """sup over the line of |phi(xi)| (|e^{-A xi}| + |e^{-B xi}|), grid
    values plus tail-model suprema (inf when a tail grows under the
    weights)."""
    _check_norm_pre(phi, A, B)
    xi = phi.xi_nodes
    mags = np.max(np.abs(phi.values), axis=1)
    out = float(np.max(mags * _weights_on(xi, A, B)))
    ea = cmath.exp(1j * phi.alpha)
    for amp, mu, sgn in ((phi.tail_plus_amp, phi.tail_plus_mu, +1),
                         (phi.tail_minus_amp, phi.tail_minus_mu, -1)):
        if amp is None or not np.any(np.abs(amp) > 0):
            continue
        edge = phi.base + sgn * ea * phi.half_width
        for Z in (A, B):
            slope = np.max(np.atleast_1d(mu).real) - sgn * (Z * ea).real
            w_edge = math.exp(-(Z * edge).real)
            v_edge = float(np.max(np.abs(amp))) * w_edge
            if slope > 1e-12:
                return math.inf
            out = max(out, v_edge)
    return out


def norm_int(phi: LineFunction, A: complex, B: complex) -> float:
    """Integral norm of |phi| under the two-exponential weight along the
    line, grid quadrature plus closed-form tails."""
    _check_norm_pre(phi, A, B)
    u = phi.nodes
    xi = phi.xi_nodes
    mags = np.max(np.abs(phi.values), axis=1)
    g = mags * _weights_on(xi, A, B)
    if phi.support == "plus":
        half = (phi.n - 1) // 2
        gg = g[half:].copy()
        gg[0] *= 2.0
        val = float(simpson(gg, x=u[half:]))
    else:
        val = float(simpson(g, x=u))
    ea = cmath.exp(1j * phi.alpha)
    for amp, mu, sgn in ((phi.tail_plus_amp, phi.tail_plus_mu, +1),
                         (phi.tail_minus_amp, phi.tail_minus_mu, -1)):
        if amp is None or not np.any(np.abs(amp) > 0):
            continue
        if sgn < 0 and phi.support == "plus":
            continue
        edge = phi.base + sgn * ea * phi.half_width
        a0 = float(np.max(np.abs(amp)))
        r0 = np.max(np.atleast_1d(mu).real)
        for Z in (A, B):
            rate = sgn * (Z * ea).real - r0
            if rate <= 1e-12:
                raise ConvergenceError("norm infinite: tail grows under the "
                                       "weights")
            val += a0 * math.exp(-(Z * edge).real) / rate
    return val


__all__ = [
    "LineFunction", "DiracAtom", "StripFunction", "make_line_function",
    "fit_tails", "convolve", "convolve_dirac", "convolve_kernel_grid",
    "convolve_xtilde", "norm_sup", "norm_int", "resample_offset",
    "resample_values", "strip_map",
]
