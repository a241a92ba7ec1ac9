import numpy as np
import pytest

from borelsum.series import SystemSpec


def make_u_spec(lambda1: float = 1.2, rho1: float = 0.5) -> SystemSpec:
    """(x^2 - eps) u' = u + (x^2 - eps)."""
    g0 = np.zeros((1, 2, 1))
    g0[0, 0, 0] = 1.0
    return SystemSpec(dim=1, M_coeffs=[np.array([[1.0]])],
                      g_terms={(0,): g0}, L1=1.0, Lambda1=lambda1, rho1=rho1)


def make_y_spec() -> SystemSpec:
    """(x^2 - eps) y' = y + 2 x y + (x^2 - eps)^2."""
    g0 = np.zeros((3, 2, 1))
    g0[2, 0, 0] = 1.0
    g0[0, 1, 0] = -1.0
    return SystemSpec(dim=1, M_coeffs=[np.array([[1.0]])],
                      a_terms={(1,): np.array([[2.0]])},
                      g_terms={(0,): g0}, L1=1.0, Lambda1=1.2, rho1=0.5)


def make_euler_spec() -> SystemSpec:
    """x^2 u' = u - x^2 (eps = 0 use)."""
    g0 = np.zeros((1, 1, 1))
    g0[0, 0, 0] = -1.0
    return SystemSpec(dim=1, M_coeffs=[np.array([[1.0]])],
                      g_terms={(0,): g0}, L1=1.0, Lambda1=0.1, rho1=0.5)


@pytest.fixture
def u_spec():
    return make_u_spec()


@pytest.fixture
def y_spec():
    return make_y_spec()


@pytest.fixture
def euler_spec():
    return make_euler_spec()
