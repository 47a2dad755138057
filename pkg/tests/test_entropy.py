import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from korenblum.dyadic import Arc, DyadicAngle
from korenblum.entropy import (
    block_area,
    complementary_arcs,
    coverage_measure,
    entropy_from_gaps,
    h_alpha_area,
    h_E,
    log_inverse,
    phi_E,
    radial_integral,
    radial_integral_closed_form,
    s_entropy,
    sigma_t,
    sigma_tilde,
    stolz_series_tests,
    weighted_coverage,
)
from korenblum.errors import DomainError
from korenblum.geometry import PolarRectangle
from korenblum.minorant import Minorant


@pytest.mark.parametrize("N", [2, 8, 64, 1024])
@pytest.mark.parametrize("s", [0.5, 1.0, 2.0])
def test_equispaced_entropy_oracle(N, s):
    F = [Fraction(i, N) for i in range(N)]
    exact = math.log(math.e * N) ** s
    assert s_entropy(F, s).value == pytest.approx(exact, rel=1e-10)


def test_single_point_entropy():
    assert s_entropy([Fraction(1, 3)], 1.0).value == pytest.approx(1.0)


def test_complementary_arcs_merge_repeats_and_wrap():
    arcs = complementary_arcs([Fraction(3, 4), Fraction(1, 4), Fraction(1, 4)])
    assert arcs == [(Fraction(1, 4), Fraction(1, 2)), (Fraction(3, 4), Fraction(1, 2))]
    with pytest.raises(DomainError):
        complementary_arcs([])


@given(st.lists(st.integers(0, 255), min_size=1, max_size=40), st.sampled_from([0.5, 1.0, 2.0]))
def test_gap_multiset_matches_explicit(ks, s):
    F = [Fraction(k, 256) for k in ks]
    gaps = Counter(length for _, length in complementary_arcs(F))
    assert entropy_from_gaps(gaps, s) == pytest.approx(s_entropy(F, s).value, rel=1e-12)


@given(st.lists(st.integers(0, 255), min_size=1, max_size=30), st.integers(0, 255))
def test_entropy_monotone_under_insertion(ks, extra):
    F = [Fraction(k, 256) for k in ks]
    assert s_entropy(F + [Fraction(extra, 256)], 1.0).value >= s_entropy(F, 1.0).value - 1e-12


def test_log_inverse_tiny_fraction():
    x = Fraction(1, 1 << 4096)
    assert log_inverse(x) == pytest.approx(4096 * math.log(2))


@pytest.mark.parametrize("alpha", [0.0, 1.0, 2.5])
def test_radial_integral_closed_form(alpha):
    for lo, hi in ((1e-6, 1e-3), (2.0 ** -20, 2.0 ** -10), (0.25, 0.5)):
        assert radial_integral(lo, hi, alpha) == pytest.approx(radial_integral_closed_form(lo, hi, alpha), rel=1e-9)


def test_h_alpha_area_additive_and_rejects_overlap():
    a = PolarRectangle(Arc(DyadicAngle.from_fraction(Fraction(0)), 3), 6, 5)
    b = PolarRectangle(Arc(DyadicAngle.from_fraction(Fraction(1, 8)), 3), 6, 5)
    c = PolarRectangle(Arc(DyadicAngle.from_fraction(Fraction(1, 16)), 4), 7, 5)
    assert h_alpha_area([a, b], 1.0) == pytest.approx(block_area(a, 1.0) + block_area(b, 1.0))
    with pytest.raises(DomainError):
        h_alpha_area([a, c], 1.0)
    with pytest.raises(DomainError):
        h_alpha_area([a], -1.0)


def test_sigma_tilde_sandwich():
    rng = np.random.default_rng(7)
    F = [Fraction(k, 16) for k in range(16)]
    E = np.sqrt(rng.uniform(0.5, 0.999, 400)) * np.exp(2j * np.pi * rng.uniform(size=400))
    t = 0.1
    tilde = sigma_tilde(F, E, t)
    assert tilde > 0
    # squares fully inside the star only contain star points; diameters are comparable to 1-|z|
    assert tilde <= 10.0 * sigma_t(F, E, t)


def test_phi_and_h_E_single_point():
    E = [0.9 + 0j]
    assert phi_E(0.0, E) == 1
    assert phi_E(math.pi, E) == 0
    assert h_E(2, E) == 0.0
    assert 0 < h_E(1, E) < 0.1


def test_coverage_measure_wrap():
    # arcs (-0.1, 0.1) and (0, 0.2) overlap on (0, 0.1)
    got = coverage_measure(np.array([0.0, 0.1]), np.array([0.1, 0.1]), 2)
    assert got == pytest.approx(0.1)
    assert coverage_measure(np.array([0.0]), np.array([4.0]), 1) == pytest.approx(2 * math.pi)


@settings(max_examples=50)
@given(st.lists(st.tuples(st.floats(0, 1), st.floats(0, 0.3)), min_size=1, max_size=12), st.integers(1, 4))
def test_coverage_matches_grid(arcs, n):
    c = np.array([a for a, _ in arcs]) * 2 * math.pi
    h = np.array([b for _, b in arcs])
    grid = (np.arange(20000) + 0.5) / 20000 * 2 * math.pi
    d = np.abs((grid[:, None] - c[None, :] + math.pi) % (2 * math.pi) - math.pi)
    approx = np.count_nonzero((d < h[None, :]).sum(axis=1) >= n) / 20000 * 2 * math.pi
    assert coverage_measure(c, h, n) == pytest.approx(approx, abs=2 * len(arcs) * 2 * math.pi / 20000 + 1e-12)


def test_weighted_coverage():
    assert weighted_coverage([0, 1], [2, 3], [1, 1], 2) == pytest.approx(1.0)
    assert weighted_coverage([0], [1], [0.5], 1) == 0.0


def test_stolz_series_partial_sums():
    E = [0.9 * np.exp(2j * np.pi * k / 16) for k in range(16)] + [0.99 + 0j]
    M = Minorant.parse("logpower:1,1")
    hw, wm = stolz_series_tests(E, [1.0] * 4, M, 4)
    assert hw == pytest.approx(sum(h_E(n, E) for n in range(1, 5)))
    assert wm == pytest.approx(sum(1.0 / (n * math.log(2)) for n in range(1, 5)))
    with pytest.raises(DomainError):
        stolz_series_tests(E, [1.0, 2.0], M, 2)
