import cmath
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from borelsum.errors import DomainError
from borelsum.geometry import (DirectionRange, SheetPoint, SqrtEps,
                               admissible_alphas, inverse_time,
                               sector_contains, strip_width, time_coord)


def test_time_coord_s_zero_is_reciprocal():
    s = SqrtEps(0.0)
    assert time_coord(SheetPoint(0.5j), s) == 1.0 / 0.5j
    with pytest.raises(DomainError):
        time_coord(SheetPoint(0.0), s)


def test_time_coord_tends_to_reciprocal_as_s_to_zero():
    x = 0.3 + 0.2j
    prev = None
    for sv in (1e-2, 1e-4, 1e-6):
        t = time_coord(SheetPoint(x), SqrtEps(sv))
        err = abs(t - 1.0 / x)
        if prev is not None:
            assert err < prev
        prev = err
    assert prev < 1e-10


def test_round_trip_with_sheets():
    s = SqrtEps(0.1 * cmath.exp(0.4j))
    x = 0.25 - 0.15j
    for k in (-1, 0, 2):
        t = time_coord(SheetPoint(x, k), s)
        p = inverse_time(t, s)
        assert p.sheet == k
        assert abs(p.x - x) < 1e-12


def test_cut_raises():
    s = SqrtEps(0.1)
    with pytest.raises(DomainError):
        time_coord(SheetPoint(0.05), s)
    with pytest.raises(DomainError):
        time_coord(SheetPoint(-0.1), s)


def test_strip_width_perpendicular():
    for sv in (0.1, 0.05 * cmath.exp(0.7j)):
        s = SqrtEps(sv)
        alpha = cmath.phase(sv) + math.pi / 2
        assert strip_width(alpha, s) == pytest.approx(math.pi / abs(sv))
        # parallel direction has zero width
        assert abs(strip_width(cmath.phase(sv), s)) < 1e-12


def test_admissible_alphas_zero_and_margin():
    dr = DirectionRange(beta1=0.0, beta2=2.0, eta=0.3, rho=0.5)
    assert admissible_alphas(SqrtEps(0.0), dr) == (0.0, 2.0)
    s = SqrtEps(0.2 * cmath.exp(0.5j))
    lo, hi = admissible_alphas(s, dr)
    assert lo >= 0.5 + 0.3 - 1e-12
    assert hi <= min(2.0, 0.5 + math.pi - 0.3) + 1e-12
    assert lo < hi
    # every admissible alpha gives a strip of positive width
    for frac in (0.25, 0.5, 0.75):
        alpha = lo + frac * (hi - lo)
        assert strip_width(alpha, s) > 0


def test_sector_contains():
    dr = DirectionRange(beta1=0.0, beta2=2.0, eta=0.3, rho=0.5)
    assert sector_contains(SqrtEps(0.0), dr)
    assert sector_contains(SqrtEps(0.1 * cmath.exp(0.5j)), dr)
    assert not sector_contains(SqrtEps(0.6), dr)  # too large
    with pytest.raises(DomainError):
        admissible_alphas(SqrtEps(0.6), dr)


@settings(max_examples=60, deadline=None)
@given(re=st.floats(-2.0, 2.0), im=st.floats(-2.0, 2.0),
       sr=st.floats(0.01, 0.3), sphi=st.floats(-3.0, 3.0),
       k=st.integers(-2, 2))
def test_round_trip_property(re, im, sr, sphi, k):
    x = complex(re, im)
    s = SqrtEps(sr * cmath.exp(1j * sphi))
    if abs(x - s.s) < 1e-3 or abs(x + s.s) < 1e-3:
        return
    try:
        t = time_coord(SheetPoint(x, k), s)
    except DomainError:
        return  # x on the cut
    p = inverse_time(t, s)
    assert p.sheet == k
    assert abs(p.x - x) < 1e-9 * max(1.0, abs(x))
