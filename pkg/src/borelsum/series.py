"""Formal power series layer: coefficient transforms, the recursive formal
solution of the system

    (x^2 - eps) dy/dx = M(eps) y + f(x, y, eps),

growth diagnostics, and local-to-Fourier re-expansion near a simple
singular point.

The right-hand side f is ingested already decomposed as

    f = sum_{|l|>=2} m_l(eps) y^l  +  x sum_{|l|>=1} a_l(eps) y^l
        + (x^2 - eps) sum_{|l|>=0} g_l(x, eps) y^l

with multi-indices l in N^m; no automatic splitting of a raw f is
attempted (it would not be unique).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .polyops import (
    bs_from_poly2,
    bs_mul,
    bs_zero,
    poly_eval,
    poly2_eval,
    series_mul1,
    taylor_shift,
)

SV_FLOOR = 1e-10  # default singular-value floor for M(0)


# ---------------------------------------------------------------------------
# basic containers


@dataclass(frozen=True)
class PowerSeries1:
    """Truncated power series sum_k c_k x^k; coeffs may carry a trailing
    component axis for vector-valued series."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if not np.all(np.isfinite(c)):
            raise ConfigError("power series has non-finite coefficients")
        object.__setattr__(self, "coeffs", c)

    @property
    def trunc_order(self) -> int:
        return self.coeffs.shape[0] - 1

    def __call__(self, x):
        return poly_eval(self.coeffs, x)


@dataclass(frozen=True)
class PowerSeries2:
    """Double series sum_{k+j<=N} y_{kj} x^k eps^j with values in C^m.

    coeffs has shape (N+1, N+1, m); entries with k+j > N are zero padding.
    """

    coeffs: np.ndarray
    order: int

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 3:
            raise ConfigError("PowerSeries2 expects a (N+1, N+1, m) array")
        if not np.all(np.isfinite(c)):
            raise ConfigError("double series has non-finite coefficients")
        object.__setattr__(self, "coeffs", c)

    @property
    def dim(self) -> int:
        return self.coeffs.shape[2]


def multi_index(l) -> tuple:
    """Canonicalize a multi-index to a tuple of nonnegative ints."""
    t = tuple(int(v) for v in l)
    if any(v < 0 for v in t):
        raise ConfigError("multi-index entries must be nonnegative")
    return t


def mi_order(l) -> int:
    return sum(l)


# ---------------------------------------------------------------------------
# system specification


@dataclass
class SystemSpec:
    """Coefficient data of the system in decomposed form.

    M_coeffs[j] is the m x m matrix multiplying eps^j.  m_terms maps a
    multi-index (|l| >= 2) to an (d_eps+1, m) array: a polynomial in eps
    with vector coefficients.  a_terms is the same with |l| >= 1.
    g_terms maps l (|l| >= 0) to a (d_x+1, d_eps+1, m) array: a polynomial
    in (x, eps) with vector coefficients.
    """

    dim: int
    M_coeffs: list
    m_terms: dict = field(default_factory=dict)
    a_terms: dict = field(default_factory=dict)
    g_terms: dict = field(default_factory=dict)
    L1: float = 1.0
    Lambda1: float = 0.0
    rho1: float = 1.0
    sv_floor: float = SV_FLOOR

    def __post_init__(self):
        m = self.dim
        self.M_coeffs = [np.asarray(Mj, dtype=complex).reshape(m, m) for Mj in self.M_coeffs]
        if not self.M_coeffs:
            raise ConfigError("M(eps) must have at least the constant term")
        self.m_terms = {multi_index(l): np.asarray(v, dtype=complex).reshape(-1, m)
                        for l, v in self.m_terms.items()}
        self.a_terms = {multi_index(l): np.asarray(v, dtype=complex).reshape(-1, m)
                        for l, v in self.a_terms.items()}
        g = {}
        for l, v in self.g_terms.items():
            v = np.asarray(v, dtype=complex)
            if v.ndim == 2:
                v = v[:, :, None] if m == 1 else v
            g[multi_index(l)] = v.reshape(v.shape[0], v.shape[1], m)
        self.g_terms = g
        for l in self.m_terms:
            if mi_order(l) < 2 or len(l) != m:
                raise ConfigError("m-terms need |l| >= 2 and len(l) = dim")
            if not np.all(np.isfinite(self.m_terms[l])):
                raise ConfigError("non-finite m-term")
        for l in self.a_terms:
            if mi_order(l) < 1 or len(l) != m:
                raise ConfigError("a-terms need |l| >= 1 and len(l) = dim")
        for l in self.g_terms:
            if len(l) != m:
                raise ConfigError("g-term multi-index has wrong length")
        sv = np.linalg.svd(self.M_coeffs[0], compute_uv=False)
        if sv[-1] < self.sv_floor:
            raise ConfigError("M(0) is singular (smallest singular value below floor)")

    # -- evaluation helpers -------------------------------------------------

    def M_at(self, eps: complex) -> np.ndarray:
        M = np.zeros((self.dim, self.dim), dtype=complex)
        for j, Mj in enumerate(self.M_coeffs):
            M += Mj * eps**j
        return M

    def all_indices(self):
        keys = set(self.m_terms) | set(self.a_terms) | set(self.g_terms)
        return sorted(keys, key=lambda l: (mi_order(l), l))

    def f_eval(self, x, y, eps) -> np.ndarray:
        """Evaluate f(x, y, eps) at scalar x, eps and vector y."""
        y = np.asarray(y, dtype=complex)
        out = np.zeros(self.dim, dtype=complex)
        for l, c in self.m_terms.items():
            out += poly_eval(c, eps) * np.prod(y**np.array(l))
        for l, c in self.a_terms.items():
            out += x * poly_eval(c, eps) * np.prod(y**np.array(l))
        for l, c in self.g_terms.items():
            gv = np.array([poly2_eval(c[:, :, i], x, eps) for i in range(self.dim)])
            out += (x * x - eps) * gv * np.prod(y**np.array(l))
        return out

    # -- JSON round trip ----------------------------------------------------

    @staticmethod
    def from_json_dict(d: dict) -> "SystemSpec":
        try:
            m = int(d["m"])
            M_coeffs = [_cplx_array(Mj).reshape(m, m) for Mj in d["M"]]
            m_terms, a_terms, g_terms = {}, {}, {}
            for term in d.get("terms", []):
                l = multi_index(term["l"])
                kind = term["kind"]
                comp = int(term.get("component", 0))
                p = term["poly"]
                de = int(p["eps_degree"])
                dx = int(p.get("x_degree", 0))
                flat = _cplx_array(p["coeffs"])
                if kind == "g":
                    block = flat.reshape(dx + 1, de + 1)
                    tgt = g_terms.setdefault(l, np.zeros((dx + 1, de + 1, m), dtype=complex))
                    if tgt.shape[:2] != block.shape:
                        big = np.zeros((max(tgt.shape[0], dx + 1), max(tgt.shape[1], de + 1), m),
                                       dtype=complex)
                        big[: tgt.shape[0], : tgt.shape[1]] = tgt
                        tgt = g_terms[l] = big
                    tgt[: dx + 1, : de + 1, comp] += block
                elif kind in ("m", "a"):
                    store = m_terms if kind == "m" else a_terms
                    tgt = store.setdefault(l, np.zeros((de + 1, m), dtype=complex))
                    if tgt.shape[0] < de + 1:
                        big = np.zeros((de + 1, m), dtype=complex)
                        big[: tgt.shape[0]] = tgt
                        tgt = store[l] = big
                    tgt[: de + 1, comp] += flat
                else:
                    raise ConfigError(f"unknown term kind {kind!r}")
            return SystemSpec(
                dim=m, M_coeffs=M_coeffs, m_terms=m_terms, a_terms=a_terms,
                g_terms=g_terms, L1=float(d.get("L1", 1.0)),
                Lambda1=float(d.get("Lambda1", 0.0)), rho1=float(d.get("rho1", 1.0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad system description: {exc}") from exc

    @staticmethod
    def load(path: str) -> "SystemSpec":
        try:
            with open(path) as fh:
                d = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read system file {path}: {exc}") from exc
        return SystemSpec.from_json_dict(d)

    def to_json_dict(self) -> dict:
        terms = []
        for l, c in sorted(self.m_terms.items()):
            for comp in range(self.dim):
                if np.any(c[:, comp]):
                    terms.append({"l": list(l), "kind": "m", "component": comp,
                                  "poly": {"eps_degree": c.shape[0] - 1, "x_degree": 0,
                                           "coeffs": _pairs(c[:, comp])}})
        for l, c in sorted(self.a_terms.items()):
            for comp in range(self.dim):
                if np.any(c[:, comp]):
                    terms.append({"l": list(l), "kind": "a", "component": comp,
                                  "poly": {"eps_degree": c.shape[0] - 1, "x_degree": 0,
                                           "coeffs": _pairs(c[:, comp])}})
        for l, c in sorted(self.g_terms.items()):
            for comp in range(self.dim):
                if np.any(c[:, :, comp]):
                    terms.append({"l": list(l), "kind": "g", "component": comp,
                                  "poly": {"eps_degree": c.shape[1] - 1,
                                           "x_degree": c.shape[0] - 1,
                                           "coeffs": _pairs(c[:, :, comp].ravel())}})
        return {"m": self.dim,
                "M": [_matrix_pairs(Mj) for Mj in self.M_coeffs],
                "terms": terms,
                "L1": self.L1, "Lambda1": self.Lambda1, "rho1": self.rho1}

    def save(self, path: str):
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=1)
            fh.write("\n")


def _cplx_array(pairs) -> np.ndarray:
    a = np.asarray(pairs, dtype=float)
    if a.shape[-1] != 2:
        raise ConfigError("complex entries must be [re, im] pairs")
    return (a[..., 0] + 1j * a[..., 1]).reshape(-1)


def _pairs(arr) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(arr).ravel()]


def _matrix_pairs(M) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(M)]


# ---------------------------------------------------------------------------
# coefficient-level Borel transform


def formal_borel(s: PowerSeries1) -> PowerSeries1:
    """Divide out one factorial: (sum_{k>=1} y_k x^k) -> sum_j y_{j+1}/j! xi^j."""
    c = s.coeffs
    if s.trunc_order < 1:
        raise ConfigError("need at least order 1")
    if np.any(np.abs(c[0]) > 0):
        raise ConfigError("series must vanish at origin")
    j = np.arange(c.shape[0] - 1)
    from scipy.special import factorial

    fact = factorial(j, exact=False)
    if c.ndim == 1:
        return PowerSeries1(c[1:] / fact)
    return PowerSeries1(c[1:] / fact[:, None])


def gevrey_bound(s: PowerSeries1) -> tuple:
    """Heuristic growth diagnostic: c_est = max_k |y_k/k!|^{1/k} and a flag
    that is False when the sequence trends upward on the last third of the
    truncation (super-factorial growth)."""
    c = np.abs(np.asarray(s.coeffs, dtype=complex))
    if c.ndim > 1:
        c = np.max(c, axis=tuple(range(1, c.ndim)))
    n = c.shape[0] - 1
    if n < 4:
        raise ConfigError("need trunc_order >= 4")
    from scipy.special import gammaln

    k = np.arange(1, n + 1)
    logb = (np.log(np.maximum(c[1:], 1e-300)) - gammaln(k + 1)) / k
    b = np.exp(logb)
    c_est = float(np.max(b))
    i23 = max(1, (2 * n) // 3 - 1)
    ratio = b[-1] / max(b[i23 - 1], 1e-300)
    factorial_flag = bool(ratio < 1.2)
    return c_est, factorial_flag


def eval_truncated(s: PowerSeries2, x: complex, eps: complex) -> np.ndarray:
    """(x^2 - eps) * sum_{k+j<=N} y_{kj} x^k eps^j."""
    N = s.order
    out = np.zeros(s.dim, dtype=complex)
    xp = x ** np.arange(N + 1)
    ep = eps ** np.arange(N + 1)
    for k in range(N + 1):
        for j in range(N + 1 - k):
            out += s.coeffs[k, j] * (xp[k] * ep[j])
    return (x * x - eps) * out


# ---------------------------------------------------------------------------
# formal solution of the system


def formal_solution(spec: SystemSpec, N: int) -> PowerSeries2:
    """Solve the system order by order for the unique formal solution
    y-hat = (x^2 - eps) * sum y_{kj} x^k eps^j.

    Substituting y = (x^2 - eps) u into the equation and writing
    P = x^2 - eps gives

        P du/dx x ... ->  M0 y_{kj} = (k+1)(y_{k-1,j} - y_{k+1,j-1})
                          - sum_{j'>=1} M_{j'} y_{k,j-j'} - N_{kj}

    where N collects all contributions of the nonlinear terms
        N(u) = sum m_l P^{|l|-1} u^l + x sum a_l P^{|l|-1} u^l
               + sum g_l P^{|l|} u^l
    and each such term raises the total degree, so N_{kj} only involves
    already-computed coefficients.  Orders are processed by total degree
    k + j ascending, then j ascending.
    """
    m = spec.dim
    if N < 0:
        raise ConfigError("N must be >= 0")
    M0 = spec.M_coeffs[0]
    y = np.zeros((N + 1, N + 1, m), dtype=complex)
    # component series u_i as truncated bivariate series, updated as we go
    u_comp = [bs_zero(N) for _ in range(m)]

    P = bs_zero(N)
    if N >= 2:
        P[2, 0] = 1.0
    if N >= 1:
        P[0, 1] = -1.0
    xs = bs_zero(N)
    if N >= 1:
        xs[1, 0] = 1.0

    def nonlinear_series():
        """N(u) as a list of m bivariate series from the current u_comp."""
        out = [bs_zero(N) for _ in range(m)]
        for l, c in spec.m_terms.items():
            base = _ul_series(u_comp, l, N)
            if base is None:
                continue
            base = bs_mul(base, _bs_powP(P, mi_order(l) - 1, N), N)
            _acc_poly_eps(out, c, base, N)
        for l, c in spec.a_terms.items():
            base = _ul_series(u_comp, l, N)
            if base is None:
                continue
            base = bs_mul(bs_mul(base, _bs_powP(P, mi_order(l) - 1, N), N), xs, N)
            _acc_poly_eps(out, c, base, N)
        for l, c in spec.g_terms.items():
            base = _ul_series(u_comp, l, N)
            if base is None:
                continue
            base = bs_mul(base, _bs_powP(P, mi_order(l), N), N)
            for comp in range(m):
                gl = bs_from_poly2(c[:, :, comp], N)
                out[comp] = out[comp] + bs_mul(gl, base, N)
        return out

    for d in range(N + 1):
        # all coefficients at total degree d depend only on degrees < d
        # through the nonlinear part, so it can be evaluated once per level
        Nser = nonlinear_series()
        for j in range(d + 1):
            k = d - j
            rhs = np.zeros(m, dtype=complex)
            if k >= 1:
                rhs += (k + 1) * y[k - 1, j]
            if j >= 1 and k + 1 <= N:
                rhs -= (k + 1) * y[k + 1, j - 1]
            for jp in range(1, min(j, len(spec.M_coeffs) - 1) + 1):
                rhs -= spec.M_coeffs[jp] @ y[k, j - jp]
            rhs -= np.array([Nser[i][k, j] for i in range(m)])
            y[k, j] = np.linalg.solve(M0, rhs)
            for i in range(m):
                u_comp[i][k, j] = y[k, j, i]
    return PowerSeries2(coeffs=y, order=N)


def _bs_powP(P, p, N):
    out = bs_zero(N)
    out[0, 0] = 1.0
    for _ in range(p):
        out = bs_mul(out, P, N)
    return out


def _ul_series(u_comp, l, N):
    """Product prod_i u_i^{l_i} truncated at total order N; None shortcut
    is not taken (zero series propagate naturally)."""
    out = bs_zero(N)
    out[0, 0] = 1.0
    for i, li in enumerate(l):
        for _ in range(li):
            out = bs_mul(out, u_comp[i], N)
    return out


def _acc_poly_eps(out, c, base, N):
    """Accumulate (polynomial in eps with vector coefficients) * base."""
    m = len(out)
    for jp in range(c.shape[0]):
        if jp > N:
            break
        shifted = np.zeros_like(base)
        shifted[:, jp:] = base[:, : base.shape[1] - jp]
        for comp in range(m):
            out[comp] = out[comp] + c[jp, comp] * shifted


# ---------------------------------------------------------------------------
# Moebius re-expansion near x = +/- sqrt(eps)


def mobius_fourier_coeffs(taylor: PowerSeries1, s: complex, side: str, N: int) -> np.ndarray:
    """Re-expand local Taylor data at x0 = s (side 'R') or x0 = -s (side 'L')
    in powers of the ratio coordinate w.

    Side R: w = (x - s)/(x + s), so x - s = 2s w/(1 - w) and
        f(x) = sum_n a_n^R w^n  with  a_0^R = f(s).
    Side L: w_L = (x + s)/(x - s), x + s = -2s w_L/(1 - w_L).
    Composition is done by truncated series arithmetic.
    """
    if s == 0:
        raise ConfigError("Fourier expansion requires eps != 0")
    if side not in ("R", "L"):
        raise ConfigError("side must be 'R' or 'L'")
    c = np.asarray(taylor.coeffs, dtype=complex)
    # (x -+ s) as a series in w: sign * 2s * (w + w^2 + w^3 + ...)
    sign = 1.0 if side == "R" else -1.0
    geo = np.zeros(N + 1, dtype=complex)
    geo[1:] = 1.0
    dx = sign * 2.0 * s * geo  # local displacement x - x0 as a series in w
    out = np.zeros(N + 1, dtype=complex)
    out[0] = c[-1]
    for ck in c[-2::-1]:
        out = series_mul1(out, dx, N)
        out[0] += ck
    return out


__all__ = [
    "PowerSeries1", "PowerSeries2", "SystemSpec", "multi_index", "mi_order",
    "formal_borel", "formal_solution", "gevrey_bound", "eval_truncated",
    "mobius_fourier_coeffs", "taylor_shift",
]
