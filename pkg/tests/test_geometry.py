import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from korenblum.dyadic import Arc, DyadicAngle
from korenblum.errors import DomainError
from korenblum.geometry import (
    DyadicSquare,
    PolarRectangle,
    boundary_distance,
    containing_square,
    is_s_separated,
    korenblum_star_contains,
    maximal_s_separated_subset,
    rho_s,
    star_mask,
    whitney_square_region,
)


def test_containing_square_basic():
    q = containing_square(0.7 * cmath.exp(0.1j))
    assert q == DyadicSquare(1, 0)
    assert containing_square(0j) == DyadicSquare(0, 0)


def test_containing_square_radial_tie_goes_to_smaller_level():
    # 1 - |z| = 1/4 sits on the edge between levels 1 and 2
    assert containing_square(0.75 * cmath.exp(0.2j)).n == 1


@given(st.floats(0.0, 0.999), st.floats(0.0, 2 * math.pi - 1e-9))
def test_point_lies_in_its_square(r, theta):
    z = r * cmath.exp(1j * theta)
    q = containing_square(z)
    reg = whitney_square_region(q)
    d = 1.0 - abs(z)
    th = math.atan2(z.imag, z.real) % (2 * math.pi)
    assert reg.depth_lo * (1 - 1e-12) <= d <= reg.depth_hi * (1 + 1e-12) or q.n == 0
    assert reg.theta_lo - 1e-12 <= th <= reg.theta_hi + 1e-12


def test_square_index_validation():
    with pytest.raises(DomainError):
        DyadicSquare(2, 8)
    with pytest.raises(DomainError):
        containing_square(1.0 + 0j)


def test_rho_s_reduces_to_distance_for_s_at_most_one():
    z = 0.99
    assert rho_s(z, 1.0) == pytest.approx(0.01)
    assert rho_s(z, 3.0) == pytest.approx(0.01 / math.log(100.0))


def test_separated_subset_is_separated_and_maximal():
    rng = np.random.default_rng(3)
    pts = list(np.sqrt(rng.uniform(0, 0.95, 300)) * np.exp(2j * np.pi * rng.uniform(size=300)))
    kept = maximal_s_separated_subset(pts, 1.0, 0.3)
    assert is_s_separated(kept, 1.0, 0.3)
    for z in pts:
        if z not in kept:
            assert not is_s_separated(kept + [z], 1.0, 0.3)


def test_star_membership_near_and_far():
    F = [Fraction(0)]
    assert korenblum_star_contains(F, 0.5, 0.9 + 0j)
    assert not korenblum_star_contains(F, 0.5, -0.99 + 0j)
    with pytest.raises(DomainError):
        korenblum_star_contains(F, 1.5, 0j)


def test_boundary_distance_matches_brute_force():
    rng = np.random.default_rng(1)
    F = [Fraction(int(k), 64) for k in rng.integers(0, 64, 10)]
    zs = np.sqrt(rng.uniform(0, 1, 200)) * np.exp(2j * np.pi * rng.uniform(size=200))
    pts = np.exp(2j * np.pi * np.array([float(a) for a in F]))
    brute = np.abs(zs[:, None] - pts[None, :]).min(axis=1)
    assert np.allclose(boundary_distance(F, zs), brute, rtol=1e-12, atol=1e-14)
    assert (star_mask(F, 0.3, zs) == ((1 - np.abs(zs)) > 0.3 * brute)).all()


def test_polar_rectangle_ranges():
    rect = PolarRectangle(Arc(DyadicAngle.from_fraction(Fraction(1, 4)), 3), 5, 4)
    assert rect.depth_range == (2.0 ** -5, 2.0 ** -4)
    t0, t1 = rect.theta_range
    assert t0 == pytest.approx(math.pi / 2)
    assert t1 - t0 == pytest.approx(rect.angular_width)
    with pytest.raises(DomainError):
        PolarRectangle(rect.arc, 3, 4)
