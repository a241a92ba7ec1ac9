"""Small helpers for polynomial / truncated power series arithmetic.

Conventions used throughout the package:

* a polynomial in one variable is a 1-D complex array of coefficients in
  ascending order, possibly with a trailing axis of vector components
  (shape ``(d+1,)`` or ``(d+1, m)``);
* a polynomial in (x, eps) is a 2-D array ``c[k, j]`` multiplying
  ``x**k * eps**j`` (again optionally with a trailing component axis);
* a truncated bivariate series to total degree N is stored the same way
  on an ``(N+1, N+1)`` grid, entries with k + j > N being irrelevant.
"""

from __future__ import annotations

import numpy as np
from scipy.signal import convolve2d


def poly_eval(coeffs, z):
    """Horner evaluation of a 1-D coefficient array at scalar or array z.

    If ``coeffs`` has a trailing component axis the result gains it too.
    """
    c = np.asarray(coeffs, dtype=complex)
    z = np.asarray(z, dtype=complex)
    if c.ndim == 1:
        out = np.zeros_like(z)
        for ck in c[::-1]:
            out = out * z + ck
        return out
    # vector-valued: broadcast z against the component axis
    out = np.zeros(z.shape + c.shape[1:], dtype=complex)
    zb = z[..., None]
    for ck in c[::-1]:
        out = out * zb + ck
    return out


def poly2_eval(coeffs, x, eps):
    """Evaluate c[k, j] x^k eps^j (optionally vector-valued) at points."""
    c = np.asarray(coeffs, dtype=complex)
    # Horner in x of polynomials in eps
    inner = [poly_eval(c[k], eps) for k in range(c.shape[0])]
    x = np.asarray(x, dtype=complex)
    out = np.zeros_like(inner[0]) if np.ndim(inner[0]) else 0.0 + 0.0j
    out = inner[-1]
    for k in range(c.shape[0] - 2, -1, -1):
        if c.ndim == 3 and np.ndim(x):
            out = out * x[..., None] + inner[k]
        else:
            out = out * x + inner[k]
    return out


def poly_deriv(coeffs):
    c = np.asarray(coeffs, dtype=complex)
    if c.shape[0] <= 1:
        return np.zeros_like(c[:1])
    k = np.arange(1, c.shape[0])
    if c.ndim == 1:
        return c[1:] * k
    return c[1:] * k[:, None]


def poly_mul(a, b):
    return np.convolve(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def taylor_shift(coeffs, x0):
    """Re-expand p(x) = sum c_k x^k in powers of (x - x0).

    Returns d with p(x) = sum d_j (x - x0)^j.  Done by repeated synthetic
    division, which is exact in exact arithmetic and stable for the small
    degrees used here.
    """
    c = list(np.asarray(coeffs, dtype=complex))
    n = len(c)
    out = []
    for _ in range(n):
        # divide by (x - x0): remainder is p(x0)
        rem = c[-1]
        newc = [c[-1]]
        for k in range(n - 2, -1, -1):
            rem = c[k] + rem * x0
            newc.append(rem)
        newc.reverse()
        out.append(newc[0])
        c = newc[1:]
        n -= 1
        if n == 0:
            break
    return np.array(out, dtype=complex)


def series_mul1(a, b, nmax):
    """Truncated product of 1-D series, keeping orders 0..nmax."""
    a = np.asarray(a, dtype=complex)[: nmax + 1]
    b = np.asarray(b, dtype=complex)[: nmax + 1]
    return np.convolve(a, b)[: nmax + 1]


def series_compose_poly1(poly, inner, nmax):
    """poly(inner(w)) truncated at order nmax, poly a 1-D coefficient array."""
    poly = np.asarray(poly, dtype=complex)
    out = np.zeros(nmax + 1, dtype=complex)
    out[0] = poly[-1]
    for ck in poly[-2::-1]:
        out = series_mul1(out, inner, nmax)
        out[0] += ck
    return out


# ---------------------------------------------------------------------------
# bivariate truncated series (x, eps), scalar-valued 2-D arrays


def bs_zero(nmax):
    return np.zeros((nmax + 1, nmax + 1), dtype=complex)


def bs_from_poly2(coeffs, nmax):
    out = bs_zero(nmax)
    c = np.asarray(coeffs, dtype=complex)
    kx = min(c.shape[0], nmax + 1)
    ke = min(c.shape[1], nmax + 1)
    out[:kx, :ke] = c[:kx, :ke]
    return out


def bs_mul(a, b, nmax):
    return convolve2d(a, b)[: nmax + 1, : nmax + 1]


def bs_pow(a, p, nmax):
    out = bs_zero(nmax)
    out[0, 0] = 1.0
    for _ in range(p):
        out = bs_mul(out, a, nmax)
    return out


def bs_truncate_total(a, nmax):
    """Zero out entries with total degree above nmax (in place copy)."""
    out = a[: nmax + 1, : nmax + 1].copy()
    k, j = np.indices(out.shape)
    out[k + j > nmax] = 0.0
    return out
