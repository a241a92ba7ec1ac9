import cmath
import math

import numpy as np
import pytest

from borelsum.applications import (LinearSystemSpec, assemble_T,
                                   center_manifold_eval,
                                   normalization_residual, ode_residual,
                                   riccati_reduce, strip_margin, u_matrix)
from borelsum.errors import DomainError
from borelsum.geometry import SqrtEps, inverse_time
from borelsum.solver import residue_coefficients, residue_series_eval, \
    solve_fixed_point

S = SqrtEps(0.1)


def desk_linear():
    return LinearSystemSpec(n=2, lam0=(1.0, -1.0), lam1=(0.1, -0.1),
                            R=((0.0, 0.3), (0.2, 0.0)))


def test_ode_residual_on_residue_series(u_spec):
    c = residue_coefficients(u_spec, S, 40)

    def y_eval(x):
        return np.asarray(residue_series_eval(c, x, S)).ravel()

    # near +sqrt(eps) the local series converges fast; the residual of the
    # true solution must vanish to quadrature accuracy
    for w in (0.1, 0.15 * cmath.exp(0.4j)):
        x = S.s * (w + 1) / (w - 1)
        res = ode_residual(u_spec, y_eval, x, S, 1e-5)
        assert res < 1e-8


def test_strip_margin_sign(u_spec):
    sol = solve_fixed_point(u_spec, S, 1.2, "+", lam=1.5,
                            half_width=30.0, n=257, tol=1e-10)
    ea = cmath.exp(-1j * 1.2)
    mid = inverse_time(10.0 * ea, S)
    assert strip_margin(sol, mid) > 0
    edge = inverse_time(1.0 * ea, S)  # r < lambda
    assert strip_margin(sol, edge) <= 0


def test_center_manifold_eval_outside_domain(u_spec):
    sol = solve_fixed_point(u_spec, S, 1.2, "+", lam=1.5,
                            half_width=30.0, n=257, tol=1e-10)
    with pytest.raises(DomainError):
        center_manifold_eval([sol], 5.0)  # far outside Z(sqrt(eps))


def test_riccati_reduce_shapes():
    lin = desk_linear()
    spec = riccati_reduce(lin)
    assert spec.dim == 2
    assert spec.Lambda1 > 0
    U = u_matrix(lin, np.array([0.1 + 0.0j, -0.2j]))
    assert U.shape == (2, 2)
    assert np.all(np.diagonal(U) == 0)  # off-diagonal parametrization


def test_assemble_T_anchor_identity():
    lin = desk_linear()
    alpha = math.pi / 2 + math.pi / 12
    s = SqrtEps(0.1 * cmath.exp(1j * math.pi / 6))

    def U_zero(p):
        return np.zeros(2, dtype=complex)

    T = assemble_T(lin, U_zero, s, s.s, alpha)
    assert np.allclose(T, np.eye(2), atol=1e-12)


def test_normalization_residual_smoke():
    # with U = 0 the candidate T is not a solution, so the residual must be
    # visibly nonzero; this guards against a residual that is trivially 0
    lin = desk_linear()
    alpha = math.pi / 2 + math.pi / 12
    s = SqrtEps(0.1 * cmath.exp(1j * math.pi / 6))

    def U_zero(p):
        return np.zeros(2, dtype=complex)

    def T_eval(x):
        return assemble_T(lin, U_zero, s, x, alpha)

    x = 0.3 * cmath.exp(1j * alpha)
    res = normalization_residual(lin, T_eval, x, s, 1e-4, direction=alpha)
    assert res > 1e-6
