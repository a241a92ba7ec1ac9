import cmath
import math

import numpy as np
import pytest

from borelsum.errors import (ConfigError, ConvergenceError, DomainError)
from borelsum.geometry import SqrtEps
from borelsum.solver import (build_omega_grid, conjugate_minus,
                             export_solution, residue_coefficients,
                             residue_series_eval, solve_fixed_point)
from borelsum.transforms import chi_poly_eval
from conftest import make_u_spec, make_y_spec

S = SqrtEps(0.1)
P = np.array([[0.0], [1.0]], dtype=complex)


def test_linear_fixed_point_exact(u_spec):
    sol = solve_fixed_point(u_spec, S, 1.2, "+", lam=1.5,
                            half_width=30.0, n=1025, tol=1e-12)
    assert sol.info["iterations"] <= 2
    for line in sol.strip.lines:
        xi = line.xi_nodes
        exact = chi_poly_eval(P, xi, "+", S) / (xi.reshape(-1, 1) - 1.0)
        assert np.max(np.abs(line.values - exact)) < 1e-8


def test_grid_validation(u_spec):
    with pytest.raises(DomainError):
        build_omega_grid(u_spec, S, 1.2, "+", lam=1.0)  # lam <= Lambda1
    with pytest.raises(ConfigError):
        build_omega_grid(u_spec, S, 1.2, "+", lam=1.5, n=1024)  # even n
    with pytest.raises(ConfigError):
        solve_fixed_point(u_spec, S, 1.2, "x", lam=1.5)  # bad side


def test_spectrum_clearance():
    spec = make_u_spec(lambda1=0.1, rho1=1.5)
    with pytest.raises(DomainError):
        build_omega_grid(spec, S, 0.05, "+", lam=0.2, half_width=30.0)


def test_nonlinear_divergence_for_large_s():
    # the contraction constant scales with |s|; at |s| = 0.4 the Picard
    # iteration genuinely diverges for the nonlinear equation
    spec = make_y_spec()
    with pytest.raises(ConvergenceError):
        solve_fixed_point(spec, SqrtEps(0.4), 1.2, "+", lam=1.5,
                          half_width=30.0, n=513, tol=1e-10, max_iter=40)


def test_conjugate_minus_side(u_spec):
    sol = solve_fixed_point(u_spec, S, 1.2, "+", lam=1.5,
                            half_width=30.0, n=1025, tol=1e-12)
    mi = conjugate_minus(sol)
    assert mi.side == "-"
    assert mi.strip.dim == sol.strip.dim
    # the minus solution solves the minus-side equation: it must equal the
    # minus-kernel closed form wherever the plus data is representable
    # (the conjugation cannot recover values past the underflow floor)
    for plus, line in zip(sol.strip.lines, mi.strip.lines):
        xi = line.xi_nodes
        exact = chi_poly_eval(P, xi, "-", S) / (xi.reshape(-1, 1) - 1.0)
        mask = np.abs(plus.values) > 1e-250
        assert np.max(np.abs(line.values - exact)[mask]) < 1e-8


def test_residue_coefficients_closed_form(u_spec):
    K = 30
    c = residue_coefficients(u_spec, S, K)
    k = np.arange(1, K + 1)
    rk = c[1:, 0] / (-2.0 * S.s)
    want = 2 * k * S.s / (2 * k * S.s + 1)
    assert np.max(np.abs(rk - want)) < 1e-12


def test_residue_series_eval_shape(u_spec):
    c = residue_coefficients(u_spec, S, 12)
    w = 0.2 * cmath.exp(0.3j)
    x = S.s * (w + 1) / (w - 1)
    val = np.asarray(residue_series_eval(c, x, S))
    assert val.shape[-1] == 1
    assert np.all(np.isfinite(val))


def test_export_solution(tmp_path, u_spec):
    import hashlib
    import json

    sol = solve_fixed_point(u_spec, S, 1.2, "+", lam=1.5,
                            half_width=30.0, n=257, tol=1e-11)
    mpath = export_solution(sol, str(tmp_path), tag="t")
    manifest = json.loads(open(mpath).read())
    assert manifest["lines"]
    for entry in manifest["lines"]:
        p = tmp_path / entry["file"]
        assert p.exists()
        digest = hashlib.sha256(p.read_bytes()).hexdigest()
        assert digest == entry["sha256"]
    assert manifest["info"]["iterations"] >= 1


def test_retry_shrinks_lambda(u_spec):
    # a lambda too close to Lambda1 makes the first grid slow; the solve
    # must still succeed (possibly after retries) and record the lambda used
    sol = solve_fixed_point(u_spec, S, 1.2, "+", lam=1.25,
                            half_width=30.0, n=1025, tol=1e-10)
    assert sol.info["lambda"] >= 1.25
    assert math.isfinite(sol.info["relative_diff"])
