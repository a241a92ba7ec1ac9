import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from borelsum.errors import ConfigError
from borelsum.series import (PowerSeries1, PowerSeries2, SystemSpec,
                             eval_truncated, formal_borel, formal_solution,
                             gevrey_bound, multi_index)
from conftest import make_u_spec, make_y_spec


def test_formal_borel_divides_one_factorial():
    # sum_{k>=1} y_k x^k -> sum_j y_{j+1}/j! xi^j
    c = np.array([0.0, 1.0, 2.0, 6.0, 24.0])
    b = formal_borel(PowerSeries1(c))
    want = np.array([1.0, 2.0 / 1, 6.0 / 2, 24.0 / 6])
    assert np.allclose(b.coeffs, want, rtol=0, atol=1e-14)


def test_formal_borel_rejects_nonzero_constant():
    with pytest.raises(ConfigError):
        formal_borel(PowerSeries1(np.array([1.0, 1.0])))


def test_gevrey_bound_flags():
    k = np.arange(25)
    fact = np.array([math.factorial(max(v - 1, 0)) for v in k], dtype=float)
    fact[0] = 0.0
    c_est, flag = gevrey_bound(PowerSeries1(fact))
    assert flag  # (k-1)! is Gevrey-1
    assert 0.5 < c_est < 2.0
    superfact = np.array([float(math.factorial(v)) ** 2 for v in k])
    _, flag2 = gevrey_bound(PowerSeries1(superfact))
    assert not flag2


def test_multi_index_validation():
    assert multi_index([1, 0, 2]) == (1, 0, 2)
    with pytest.raises(ConfigError):
        multi_index([-1])


def test_system_spec_json_round_trip(y_spec):
    d = y_spec.to_json_dict()
    back = SystemSpec.from_json_dict(d)
    assert back.dim == y_spec.dim
    assert np.allclose(back.M_at(0.3 + 0.1j), y_spec.M_at(0.3 + 0.1j))
    for x, y, eps in ((0.2, [0.1], 0.01), (0.1j, [0.3 - 0.2j], -0.02j)):
        assert np.allclose(back.f_eval(x, y, eps), y_spec.f_eval(x, y, eps))
    assert (back.L1, back.Lambda1, back.rho1) == \
        (y_spec.L1, y_spec.Lambda1, y_spec.rho1)


def test_system_spec_rejects_singular_m0():
    with pytest.raises(ConfigError):
        SystemSpec(dim=1, M_coeffs=[np.array([[0.0]])])


def test_formal_solution_satisfies_equation():
    # residual of the truncated series is O((|x| + |eps|)^{N+1}) beyond
    # the solved orders; check the leading orders cancel exactly
    spec = make_y_spec()
    N = 6
    sol = formal_solution(spec, N)
    assert isinstance(sol, PowerSeries2)

    def residual(x, eps):
        h = 1e-6 * max(abs(x), 1e-3)
        yp = eval_truncated(sol, x + h, eps)
        ym = eval_truncated(sol, x - h, eps)
        y = eval_truncated(sol, x, eps)
        dy = (yp - ym) / (2 * h)
        return abs((x * x - eps) * dy[0] - spec.M_at(eps)[0, 0] * y[0]
                   - spec.f_eval(x, y, eps)[0])

    r1 = residual(0.1, 0.5 * 0.1 ** 2)
    r2 = residual(0.05, 0.5 * 0.05 ** 2)
    # halving x (and quartering eps) must shrink the residual by at least
    # the truncation order
    assert r1 < 1e-5
    assert r2 < r1 / 2 ** N


@settings(max_examples=30, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=10.0, allow_nan=False,
                                   allow_infinity=False),
                min_size=3, max_size=8))
def test_formal_borel_linearity(cs):
    c = np.array([0.0] + cs)
    b1 = formal_borel(PowerSeries1(c))
    b2 = formal_borel(PowerSeries1(2.5 * c))
    assert np.allclose(b2.coeffs, 2.5 * b1.coeffs, rtol=1e-12, atol=1e-12)


def test_formal_solution_u_coefficients():
    sol = formal_solution(make_u_spec(), 4)
    got = sol.coeffs[:3, 0, 0]
    assert np.allclose(got, [-1.0, -2.0, -6.0], atol=1e-13)
