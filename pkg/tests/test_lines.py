import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from borelsum.errors import ConfigError
from borelsum.lines import (DiracAtom, convolve, convolve_dirac,
                            make_line_function, norm_int, norm_sup)

ALPHA = 0.7
EA = cmath.exp(-1j * ALPHA)


def gaussian_line(scale=1.0, center=0.0, T=8.0, n=513):
    return make_line_function(
        lambda xi: (scale * np.exp(-((EA * xi).real - center) ** 2
                                   - ((EA * xi).imag) ** 2)).reshape(-1, 1),
        0.0, ALPHA, T, n)


def test_convolve_gaussians_closed_form():
    # along the line, e^{-u^2} * e^{-u^2} = sqrt(pi/2) e^{-v^2/2}, and the
    # path element contributes e^{i alpha}
    phi = gaussian_line(n=1025)
    conv = convolve(phi, phi)
    v = conv.nodes
    mask = np.abs(v) < 4.0
    want = (cmath.exp(1j * ALPHA) * math.sqrt(math.pi / 2.0)
            * np.exp(-v[mask] ** 2 / 2.0))
    assert np.allclose(conv.values[mask, 0], want, atol=1e-8)


def test_convolve_commutative():
    phi = gaussian_line(scale=1.3, center=0.5)
    psi = gaussian_line(scale=0.4 - 0.2j, center=-0.8)
    c1 = convolve(phi, psi)
    c2 = convolve(psi, phi)
    assert np.allclose(c1.values, c2.values, atol=1e-12)


def test_convolve_direction_mismatch_raises():
    phi = gaussian_line()
    psi = make_line_function(
        lambda xi: np.exp(-np.abs(xi) ** 2).reshape(-1, 1),
        0.0, ALPHA + 0.1, 8.0, 513)
    with pytest.raises(ConfigError):
        convolve(phi, psi)


def test_dirac_unit_and_shift():
    phi = gaussian_line()
    unit = convolve_dirac(DiracAtom(0.0, np.array([1.0 + 0j])), phi)
    assert np.array_equal(unit.values, phi.values)
    assert unit.base == phi.base
    shifted = convolve_dirac(DiracAtom(0.3j, np.array([2.0 + 0j])), phi)
    assert shifted.base == phi.base + 0.3j
    assert np.allclose(shifted.values, 2.0 * phi.values)


def test_dirac_composition():
    phi = gaussian_line()
    a, b = 0.2 + 0.1j, -0.05j
    one = convolve_dirac(DiracAtom(a, np.array([1.5 + 0j])),
                         convolve_dirac(DiracAtom(b, np.array([2.0 + 0j])),
                                        phi))
    both = convolve_dirac(DiracAtom(a + b, np.array([3.0 + 0j])), phi)
    assert abs(one.base - both.base) < 1e-15
    assert np.allclose(one.values, both.values, rtol=1e-12)


def test_norms_zero_and_scaling():
    phi = gaussian_line()
    zero = make_line_function(
        lambda xi: np.zeros((len(xi), 1), dtype=complex), 0.0, ALPHA,
        8.0, 513)
    A, B = -0.5 * EA, 0.5 * EA
    assert norm_sup(zero, A, B) == 0.0
    assert norm_int(zero, A, B) == 0.0
    two = make_line_function(
        lambda xi: 2.0 * np.exp(-((EA * xi).real) ** 2
                                - ((EA * xi).imag) ** 2).reshape(-1, 1),
        0.0, ALPHA, 8.0, 513)
    assert norm_sup(two, A, B) == pytest.approx(2 * norm_sup(phi, A, B))
    assert norm_int(two, A, B) == pytest.approx(2 * norm_int(phi, A, B))


def test_norm_precondition():
    phi = gaussian_line()
    with pytest.raises(ConfigError):
        norm_sup(phi, 0.5 * EA, -0.5 * EA)


def test_tail_fit_exponential():
    mu = -1.3
    phi = make_line_function(
        lambda xi: np.exp(mu * np.abs((EA * xi).real)).reshape(-1, 1),
        0.0, ALPHA, 12.0, 1025)
    assert phi.tail_plus_mu[0].real == pytest.approx(mu, abs=1e-6)
    assert phi.tail_minus_mu[0].real == pytest.approx(mu, abs=1e-6)


@settings(max_examples=25, deadline=None)
@given(c1=st.floats(0.5, 1.5), c2=st.floats(0.5, 1.5),
       w1=st.floats(-0.5, 0.5), w2=st.floats(-0.5, 0.5),
       q=st.floats(0.3, 1.2))
def test_young_inequality_property(c1, c2, w1, w2, q):
    phi = gaussian_line(scale=c1, center=w1)
    psi = gaussian_line(scale=c2, center=w2)
    conv = convolve(phi, psi)
    A, B = -q * EA, q * EA
    assert norm_sup(conv, A, B) <= (norm_sup(phi, A, B)
                                    * norm_int(psi, A, B)) + 1e-9
    assert norm_int(conv, A, B) <= (norm_int(phi, A, B)
                                    * norm_int(psi, A, B)) + 1e-9
